import pytest

from crelay.constraints import ConstraintConfig
from crelay.fading import SnrDist

# Nakagami (m, gamma_bar) fits of the four outdoor and five indoor positions
PR_FITS = {
    "PR1": (1.13, 266.0),
    "PR2": (0.98, 489.0),
    "PR3": (1.11, 57.34),
    "PR4": (1.25, 94.20),
}
ID_FITS = {
    "ID1": (1.23, 952.0),
    "ID2": (1.28, 3.65e4),
    "ID3": (1.17, 179.0),
    "ID4": (1.16, 413.0),
    "ID5": (1.23, 6.99e4),
}


@pytest.fixture
def pr_dists() -> dict[str, SnrDist]:
    return {node: SnrDist.nakagami(m, g) for node, (m, g) in PR_FITS.items()}


@pytest.fixture
def id_dists() -> dict[str, SnrDist]:
    return {node: SnrDist.nakagami(m, g) for node, (m, g) in ID_FITS.items()}


@pytest.fixture
def design_cfg() -> ConstraintConfig:
    return ConstraintConfig(i_th=-90.0, eps_i_out=0.1, c_th=7.5, eps_c_out=0.1, noise_power=-119.5)


@pytest.fixture
def fits_csv(tmp_path):
    """fits.csv holding the Rayleigh and Nakagami rows of every node"""
    lines = ["node_id,model,mse,gamma_bar,m,clamped"]
    for node, (m, g) in {**PR_FITS, **ID_FITS}.items():
        lines.append(f"{node},rayleigh,0.001,{g},,0")
        lines.append(f"{node},nakagami,0.0002,{g},{m},0")
    path = tmp_path / "fits.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
