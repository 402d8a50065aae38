def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call":
                continue
            lines += [v for k, v in rep.user_properties if k == "acceptance"]
    if lines:
        order = {n: i for i, n in enumerate(_names())}
        lines.sort(key=lambda s: order.get(s.split()[1], 99))
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)


def _names():
    try:
        from test_acceptance import CHECKS
    except ImportError:
        return []
    return [n for n, _ in CHECKS]
