"""Shared pytest hooks.

After a run that touched the acceptance module, print one PASS/FAIL line
per criterion so the outcome of each is visible at a glance.
"""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid or "::" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            when = getattr(rep, "when", None)
            if status == "passed":
                if when == "call":
                    outcomes.setdefault(name, True)
            else:
                outcomes[name] = False
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(outcomes):
        parts = name.removeprefix("test_").split("_")
        label = f"criterion {parts[0]} " + "-".join(parts[1:])
        verdict = "PASS" if outcomes[name] else "FAIL"
        terminalreporter.write_line(f"{label}: {verdict}")
