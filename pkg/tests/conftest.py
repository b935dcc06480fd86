import pytest

# criterion number -> list of (part, ok, detail)
_ACCEPTANCE = {}


class AcceptanceLog:
    def record(self, num, part, ok, detail=""):
        _ACCEPTANCE.setdefault(num, []).append((part, bool(ok), detail))
        print(f"criterion {num} [{part}]: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def acceptance_lines():
    lines = []
    for num in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[num]
        ok = all(p[1] for p in parts)
        failed = [p for p in parts if not p[1]]
        info = "; ".join(f"{p[0]}: {p[2]}" for p in failed) if failed else \
            ", ".join(p[0] for p in parts)
        lines.append(f"ACCEPTANCE {num:>2} {'PASS' if ok else 'FAIL'}  {info}")
    return lines


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
