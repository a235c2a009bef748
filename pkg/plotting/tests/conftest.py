import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))


HEADER = "r,kappa,beta,freq_RR,freq_RS,freq_O,freq_M,residual"


@pytest.fixture
def synthetic_csv(tmp_path):
    """Small single-beta table with hand-picked values."""
    path = tmp_path / "sweep.csv"
    path.write_text(
        HEADER + "\n"
        "0.0,1.0,0.1,0.01,0.02,0.9,0.07,1e-16\n"
        "1.5,1.0,0.1,0.5,0.05,0.4,0.05,2e-16\n"
        "3.0,1.0,0.1,0.97,0.01,0.01,0.01,3e-16\n")
    return path


@pytest.fixture(scope="session")
def cli_outputs(tmp_path_factory):
    """Real fig1/fig2/fig3 CSVs produced through the ainorms CLI."""
    out_dir = tmp_path_factory.mktemp("cli")
    for command in ("fig1", "fig2", "fig3"):
        subprocess.run(
            [sys.executable, "-m", "ainorms", command, "--out-dir", str(out_dir)],
            check=True, capture_output=True, text=True)
    return out_dir
