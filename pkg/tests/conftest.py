import itertools

import pytest

from torilat.groups import all_subgroups, catalog_group, conjugate


def brute_reduced_sets(G, max_members=None, subgroups=None):
    """Every reduced set (no member contains another), up to simultaneous conjugation."""
    subs = list(subgroups) if subgroups is not None else all_subgroups(G)
    top = max_members or len(subs)
    seen, out = set(), []
    for k in range(1, top + 1):
        for combo in itertools.combinations(subs, k):
            if any(a.issubset(b) for a in combo for b in combo if a != b):
                continue
            key = min(
                tuple(sorted(conjugate(G, H, g).key() for H in combo)) for g in range(G.order)
            )
            if key not in seen:
                seen.add(key)
                out.append(combo)
    return out


@pytest.fixture
def group():
    return catalog_group


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
