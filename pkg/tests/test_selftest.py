from lambda_kerr.selftest import corrupt_normalization, format_report, selftest


def test_fast_level_passes():
    results = selftest("fast")
    assert results and all(r.passed for r in results)


def test_full_level_adds_oracle():
    names = [r.name for r in selftest("full")]
    assert any("oracle" in n for n in names)


def test_corrupted_solver_is_caught():
    results = selftest("fast", eigensystem_fn=corrupt_normalization(1 + 1e-6))
    failed = {r.name for r in results if not r.passed}
    assert "V unitarity" in failed
    assert any(n.startswith("norm conservation") for n in failed)


def test_report_summary():
    report = format_report(selftest("fast"))
    assert report.splitlines()[-1].endswith("checks passed")
