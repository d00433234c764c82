ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, float, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        name, ok, secs, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"[{k}] {'PASS' if ok else 'FAIL'}  {name}  ({secs:.2f} s)  {detail}")
