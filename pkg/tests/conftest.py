import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# (criterion number, label) -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(number: int, label: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[(number, label)] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted({n for n, _ in ACCEPTANCE}):
        subs = sorted((label, res) for (n, label), res in ACCEPTANCE.items() if n == number)
        ok = all(res[0] for _, res in subs)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}")
        for label, (passed, detail) in subs:
            terminalreporter.write_line(f"    {label:<16s} {'pass' if passed else 'FAIL'}  {detail}")
