import pytest

# filled by test_acceptance; one (number, title, passed, detail) per criterion
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {number:>2}: {title} -- {detail}")


@pytest.fixture
def record():
    def _record(number, title, checks):
        failed = [name for name, ok in checks if not ok]
        detail = "all checks met" if not failed else "failed: " + "; ".join(failed)
        ACCEPTANCE.append((number, title, not failed, detail))
        print(f"{'PASS' if not failed else 'FAIL'} criterion {number}: {title} -- {detail}")
        assert not failed, detail
    return _record
