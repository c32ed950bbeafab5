import pytest

from pencilkit import fixture_names, get_fixture, run_fixture, verify_singular_function


def test_registry_contents():
    names = fixture_names()
    assert "kronecker_L" in names and "poroelasticity_template" in names
    assert names == sorted(names)
    with pytest.raises(KeyError):
        get_fixture("no_such_fixture")


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_checks_pass(name):
    results = run_fixture(name)
    assert results, "fixture produced no checks"
    failed = [r for r in results if not r.passed]
    assert not failed, "; ".join(f"{r.name}: {r.detail}" for r in failed)


def test_parameterized_fixture_variants():
    # the Kronecker block with a different k
    results = run_fixture("kronecker_L", k=4)
    assert all(r.passed for r in results)
    # the engineered-singular pressure variant of the three-field template
    results = run_fixture("poroelasticity_template", singular_pressure=True)
    assert all(r.passed for r in results), "; ".join(
        f"{r.name}: {r.detail}" for r in results if not r.passed
    )


def test_poroelasticity_seeds_give_distinct_but_valid_instances():
    import numpy as np

    a = get_fixture("poroelasticity_template").build(seed=1, d=3, singular_pressure=False)
    b = get_fixture("poroelasticity_template").build(seed=2, d=3, singular_pressure=False)
    assert not np.allclose(a["E_mat"], b["E_mat"])
    for res in run_fixture("poroelasticity_template", seed=1):
        assert res.passed, f"{res.name}: {res.detail}"


def test_singular_function_excluded_probe_raises():
    data = get_fixture("backward_shift_diag").build()
    with pytest.raises(ValueError):
        verify_singular_function(data, [0.0], truncation=10)


def test_caveat_only_fixture_builds_no_pencil():
    fx = get_fixture("symmetric_not_sa_note")
    assert fx.caveat_only
    data = fx.build()
    assert "pencil" not in data and "caveat" in data
