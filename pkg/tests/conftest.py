import pytest

from symsq import arith, eigenform, quadforms


@pytest.fixture(scope="session")
def sieve_1e4():
    return arith.build_factor_sieve(10**4)


@pytest.fixture(scope="session")
def sieve_1e5():
    return arith.build_factor_sieve(10**5)


@pytest.fixture(scope="session")
def delta_ev_1e5():
    return eigenform.delta_eigenvalue_table(10**5)


@pytest.fixture(scope="session")
def sym2_1e5(delta_ev_1e5, sieve_1e5):
    return eigenform.sym_square(delta_ev_1e5, 10**5, table=sieve_1e5)


@pytest.fixture(scope="session")
def cg_m4():
    return quadforms.enumerate_reduced(-4)


@pytest.fixture(scope="session")
def cg_m3():
    return quadforms.enumerate_reduced(-3)


@pytest.fixture(scope="session")
def cg_m23():
    return quadforms.enumerate_reduced(-23)
