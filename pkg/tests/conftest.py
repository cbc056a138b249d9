import math

import pytest

from lora_ser.channel import ChannelParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def k1_channel():
    """Unit-power Rician channel, |mu|^2 = sigma^2 = 1/2."""
    return ChannelParams(math.sqrt(0.5), 0.5)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def _report(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
