import time

import pytest

from collisim.cli import cmd_ergotropy_surface, cmd_fig3, cmd_fig5


@pytest.fixture(scope="session")
def figure_outputs(tmp_path_factory):
    """Run the three figure commands once and share their outputs."""
    out = tmp_path_factory.mktemp("figures")
    timings = {}
    t0 = time.perf_counter()
    fig3_paths = cmd_fig3(str(out))
    timings["fig3"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    fig5_paths = cmd_fig5(str(out))
    timings["fig5"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    ergo_paths = cmd_ergotropy_surface(str(out))
    timings["ergotropy"] = time.perf_counter() - t0
    return {"dir": out, "fig3": fig3_paths, "fig5": fig5_paths,
            "ergotropy": ergo_paths, "timings": timings}
