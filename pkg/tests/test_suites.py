import math

import pytest
from jsonschema import Draft202012Validator

from laxfactor.errors import ConfigError
from laxfactor.suites import (REPORT_FIELDS, REPORT_SCHEMA, Case, Record, SuiteConfig, build_cases,
                              parse_complex, parse_int_range, run_cases, thread_count)


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("i", 1j), ("2i", 2j), ("-i", -1j), ("0.3+0.8i", 0.3 + 0.8j), ("0.3-i", 0.3 - 1j),
        ("1.5", 1.5), ("[0.3, 0.8]", 0.3 + 0.8j), ("2j", 2j), (0.5, 0.5),
    ])
    def test_complex(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize("text", ["abc", "[1, 2, 3]", "1+"])
    def test_complex_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_complex(text)

    def test_int_range(self):
        assert parse_int_range("2..4") == (2, 3, 4)
        assert parse_int_range("2,5") == (2, 5)
        for bad in ("", "a..b", "0..2"):
            with pytest.raises(ConfigError):
                parse_int_range(bad)

    def test_thread_cap(self, monkeypatch):
        monkeypatch.setenv("LAXFACTOR_THREADS", "2")
        assert thread_count(8) == 2
        assert thread_count() == 2
        monkeypatch.setenv("LAXFACTOR_THREADS", "x")
        with pytest.raises(ConfigError):
            thread_count()
        monkeypatch.delenv("LAXFACTOR_THREADS")
        assert thread_count(3) == 3


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        {"suites": []},
        {"suites": ["bogus"]},
        {"suites": ["theorem1"], "classes": ("hyperbolic",)},
        {"suites": ["theorem1"], "format": "xml"},
        {"suites": ["root-systems"], "preset": "E8"},
        {"suites": ["theorem1"], "seeds": ()},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            SuiteConfig(**kwargs)

    def test_tolerance_overrides(self):
        cfg = SuiteConfig(["factorization"], tolerances={"factorization/det-xi": 1e-3, "theorem1": 1e-2})
        assert cfg.tolerance("factorization", "det-xi/N=2", 1e-9) == 1e-3
        assert cfg.tolerance("factorization", "spin/N=2", 1e-9) == 1e-9
        assert cfg.tolerance("theorem1", "anything", 1e-9) == 1e-2

    def test_n_range(self):
        cfg = SuiteConfig(["theorem1"], N_range=(1, 2))
        assert cfg.n_values("theorem1") == (2,)
        assert SuiteConfig(["theorem1"]).n_values("theorem1") == (2, 3, 4)

    def test_seed_tags(self):
        cases = build_cases(SuiteConfig(["zero-curvature"], seeds=(0, 1)))
        assert any(c.case_id.endswith("@s1") for c in cases)
        assert {c.seed for c in cases} == {0, 1}

    def test_class_filter(self):
        cases = build_cases(SuiteConfig(["factorization"], classes=("rational",), N_range=(2,)))
        assert cases and all(not c.case_id.startswith(("elliptic", "trig")) for c in cases)


class TestRecords:
    def make(self, **kw):
        base = dict(suite="theorem1", case_id="x", residual=1e-12, tolerance=1e-10, passed=True,
                    expected="pass", wall_time_ms=1.0, provenance="t", seed=0)
        base.update(kw)
        return Record(**base)

    def test_ok_semantics(self):
        assert self.make().ok
        assert not self.make(passed=False).ok
        assert self.make(passed=False, expected="fail").ok
        assert not self.make(expected="fail").ok

    def test_dict_is_schema_valid(self):
        v = Draft202012Validator(REPORT_SCHEMA)
        d = self.make().as_dict()
        assert list(d) == list(REPORT_FIELDS)
        assert not list(v.iter_errors(d))
        d = self.make(residual=math.inf, passed=False, error="boom").as_dict()
        assert d["residual"] is None and d["error"] == "boom"
        assert not list(v.iter_errors(d))

    def test_text(self):
        assert self.make(expected="fail", passed=False).as_text().startswith("ok ")
        assert "BAD" in self.make(passed=False).as_text()

    def test_exceptions_become_records(self):
        def boom():
            raise ZeroDivisionError("x")
        cfg = SuiteConfig(["theorem1"])
        cases = [Case("theorem1", "a", "t", boom, 1e-9),
                 Case("theorem1", "b", "t", lambda: 0.0, 1e-9),
                 Case("theorem1", "c", "t", lambda: [("u", 1.0, 0.5, "fail"), ("v", 0.0, 1e-9)])]
        recs = run_cases(cases, cfg, threads=3)
        assert [r.case_id for r in recs] == ["a", "b", "c/u", "c/v"]
        assert recs[0].error.startswith("ZeroDivisionError") and not recs[0].passed
        assert recs[1].ok and recs[2].ok and recs[3].ok

    def test_order_preserved_with_threads(self):
        cfg = SuiteConfig(["theorem1"])
        cases = [Case("theorem1", str(i), "t", (lambda i=i: float(i)), 100.0) for i in range(20)]
        recs = run_cases(cases, cfg, threads=4)
        assert [r.case_id for r in recs] == [str(i) for i in range(20)]
