import xml.etree.ElementTree as ET

import numpy as np

from mwfpi import svgplot


def test_line_plot_writes_valid_svg(tmp_path):
    path = tmp_path / "line.svg"
    x = np.linspace(0, 1, 50)
    svgplot.line_plot(path, x, [np.sin(6 * x), np.cos(6 * x)],
                      labels=["s", "c"], title="t", xlabel="x", ylabel="y")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    assert len(list(root.iter("{http://www.w3.org/2000/svg}polyline"))) == 2


def test_line_plot_log_and_nan(tmp_path):
    path = tmp_path / "log.svg"
    y = np.array([1e-5, np.nan, 1e-2, 1.0])
    svgplot.line_plot(path, np.arange(4.0), [y], logy=True)
    assert path.read_text().startswith("<svg")


def test_heatmap_with_nans(tmp_path):
    path = tmp_path / "map.svg"
    z = np.arange(12.0).reshape(3, 4)
    z[1, 2] = np.nan
    svgplot.heatmap(path, np.arange(4.0), np.arange(3.0), z, clip_percentile=90)
    root = ET.parse(path).getroot()
    rects = list(root.iter("{http://www.w3.org/2000/svg}rect"))
    assert len(rects) == 13  # background + frame + 11 finite cells
