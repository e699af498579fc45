from fractions import Fraction

import numpy as np
import pytest


def rational_matrix(rng, n, m=None, lo=-9, hi=9, den=6):
    m = n if m is None else m
    out = np.empty((n, m), dtype=object)
    for a in range(n):
        for b in range(m):
            out[a, b] = Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1)))
    return out


def random_biform(rng, n, exact=False):
    from crosspos.polyalg import BiformQuad, canonical_quads

    quads = canonical_quads(n)
    if exact:
        vals = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in quads]
    else:
        vals = rng.standard_normal(len(quads)).tolist()
    return BiformQuad(n, dict(zip(quads, vals)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def schema_validator():
    import jsonschema
    from referencing import Registry, Resource

    from crosspos import schemas

    reg = Registry().with_resources(
        [(f"urn:crosspos:{n}", Resource.from_contents(schemas.load(n))) for n in schemas.NAMES])

    def validate(name, doc):
        jsonschema.Draft202012Validator(schemas.load(name), registry=reg).validate(doc)

    return validate


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion; lines are printed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
