import numpy as np
import pytest

from symcheck.pauli import bundled_hamiltonians, equilibrium_hamiltonian

# STO-3G full-CI energies (Hartree) from pyscf, frozen when the data files were generated
FCI_ENERGIES = {
    0.5: -1.0551597944706237,
    0.7414: -1.1372701746609024,
    1.0: -1.1011503302326193,
    1.5: -0.9981493534714101,
    2.0: -0.9486411121761855,
}
# <0101|H|0101> at 0.7414 A
HF_ENERGY = -1.1166843870853405


@pytest.fixture(scope="session")
def h_eq():
    return equilibrium_hamiltonian()


@pytest.fixture(scope="session")
def hamiltonians():
    return bundled_hamiltonians()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
