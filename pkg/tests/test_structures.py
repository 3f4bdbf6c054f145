import json
from pathlib import Path

import pytest

from poisson_coh.poisson_core import JacobiFailure
from poisson_coh.structures import (BUILTINS, StructureError, build_structure, description_from_json, example,
                                    load_description)

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtins_load(name):
    ps = example(name)
    assert ps.l == 2
    assert (ps.quotient is not None) == (name == "a1cone")


def test_hash_is_stable_and_content_based():
    a = BUILTINS["sl2star"]
    b = description_from_json(json.loads(json.dumps(a.to_json())))
    assert a.sha256() == b.sha256()
    assert a.sha256() != BUILTINS["a1cone"].sha256()


def test_bad_structure_fails_jacobi():
    desc = load_description(str(DATA / "bad.json"))
    with pytest.raises(JacobiFailure):
        build_structure(desc)
    assert build_structure(desc, defer_jacobi=True).n == 3


@pytest.mark.parametrize("doc", [
    {"variables": ["x"], "weights": [1]},
    {"variables": ["x", "y"], "weights": [1, 1], "l": 2, "bivector": {"1,0": "1"}},
    {"variables": ["x", "y"], "weights": [1, 1], "l": 2, "bivector": {"0,1": "z"}},
    {"variables": ["x", "y"], "weights": [1, 0], "l": 2, "bivector": {}},
    {"variables": ["x", "y"], "weights": [1, 1], "l": 2, "bivector": {"0;1": "1"}},
])
def test_schema_errors(doc):
    with pytest.raises(StructureError):
        build_structure(description_from_json(doc))
