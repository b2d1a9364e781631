import sys


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for label in sorted(results, key=lambda s: (len(s.split(":")[0]), s)):
            terminalreporter.write_line(results[label])
