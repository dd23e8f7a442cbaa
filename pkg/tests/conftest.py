import os
import sys
from fractions import Fraction
from itertools import product

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def consistent_reweightings(prof, values=(0, 1, 2, 3)):
    """Every weight function over ``values`` that the profile is consistent with (tiny n only)."""
    from ordinal_greedy import WeightedInstance, check_consistency
    from ordinal_greedy.graph_core import all_edges

    n = prof.n
    es = all_edges(n)
    for combo in product(values, repeat=len(es)):
        inst = WeightedInstance(n, {e: Fraction(v) for e, v in zip(es, combo)})
        if check_consistency(inst, prof):
            yield inst


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for num in sorted(verdicts):
            terminalreporter.write_line(verdicts[num])
