import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    criterion = getattr(item.function, "_criterion", None)
    if criterion:
        status = "PASS" if report.passed else "FAIL"
        print(f"ACCEPTANCE {criterion}: {status}")
