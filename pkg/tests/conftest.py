import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

# Acceptance tests append their "CRITERION n: PASS" lines here; the summary
# hook replays them after the test bar, where default capture cannot eat them.
acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    reported = set()
    for line in acceptance_lines:
        m = re.match(r"CRITERION (\d+):", line)
        if m:
            reported.add(int(m.group(1)))
    failed = []
    for rep in terminalreporter.stats.get("failed", []):
        m = re.search(r"test_criterion_(\d+)", rep.nodeid)
        if m and int(m.group(1)) not in reported:
            failed.append((int(m.group(1)), f"CRITERION {m.group(1)}: FAIL - {rep.nodeid}"))
    if not acceptance_lines and not failed:
        return
    terminalreporter.section("acceptance criteria")
    numbered = [(int(re.match(r"CRITERION (\d+)", s).group(1)), s) for s in acceptance_lines]
    for _, line in sorted(numbered + failed):
        terminalreporter.write_line(line)
