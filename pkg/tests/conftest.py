from fractions import Fraction

from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=20)
settings.load_profile("default")


def fr(*xs):
    return tuple(Fraction(x) for x in xs)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    """Print and keep one pass/fail line per acceptance criterion."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
