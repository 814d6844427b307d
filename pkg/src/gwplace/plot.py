"""Standalone SVG coverage maps and SF histograms."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .graph import PlacementSolution
from .radio import SPREADING_FACTORS
from .topo import Topology

SF_COLORS = {
    7: "#1a9850", 8: "#91cf60", 9: "#d9ef8b", 10: "#fee08b", 11: "#fc8d59", 12: "#d73027",
}

MARGIN = 60
PLOT_WIDTH = 720


def _svg(width: float, height: float) -> ET.Element:
    return ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=f"{width:g}", height=f"{height:g}",
        viewBox=f"0 0 {width:g} {height:g}",
    )


def _serialize(root: ET.Element) -> str:
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def _axes(root, x0, y0, x1, y1, xlabel, ylabel, xmax, ymax):
    ET.SubElement(root, "line", {"class": "axis", "x1": f"{x0:g}", "y1": f"{y1:g}", "x2": f"{x1:g}", "y2": f"{y1:g}", "stroke": "black"})
    ET.SubElement(root, "line", {"class": "axis", "x1": f"{x0:g}", "y1": f"{y0:g}", "x2": f"{x0:g}", "y2": f"{y1:g}", "stroke": "black"})
    ET.SubElement(root, "text", {"x": f"{(x0 + x1) / 2:g}", "y": f"{y1 + 40:g}", "text-anchor": "middle", "font-size": "14"}).text = xlabel
    ET.SubElement(root, "text", {"x": "16", "y": f"{(y0 + y1) / 2:g}", "text-anchor": "middle", "font-size": "14",
                                 "transform": f"rotate(-90 16 {(y0 + y1) / 2:g})"}).text = ylabel
    if xmax is not None:
        ET.SubElement(root, "text", {"x": f"{x0:g}", "y": f"{y1 + 18:g}", "font-size": "11", "text-anchor": "middle"}).text = "0"
        ET.SubElement(root, "text", {"x": f"{x1:g}", "y": f"{y1 + 18:g}", "font-size": "11", "text-anchor": "middle"}).text = f"{xmax:g}"
    if ymax is not None:
        ET.SubElement(root, "text", {"x": f"{x0 - 6:g}", "y": f"{y0 + 4:g}", "font-size": "11", "text-anchor": "end"}).text = f"{ymax:g}"


def check_consistent(topology: Topology, solution: PlacementSolution) -> None:
    """Raise ``ValueError`` if the solution names nodes the topology lacks."""
    n = len(topology)
    for v in sorted(solution.gateways):
        if not 0 <= v < n:
            raise ValueError(f"solution gateway {v} is not a node of the {n}-node topology")
    for s, g in sorted(solution.connections):
        if not (0 <= s < n and 0 <= g < n):
            raise ValueError(f"solution connection ({s}, {g}) references a node outside the {n}-node topology")


def coverage_map_svg(
    topology: Topology,
    solution: PlacementSolution,
    link_sf: dict[tuple[int, int], int] | None = None,
) -> str:
    """Map of stations, gateways and station-gateway links colored by SF.

    ``link_sf`` maps ``(station, gateway)`` to SF; links without an entry are
    drawn grey.
    """
    check_consistent(topology, solution)
    n = len(topology)
    coords = topology.coords
    if topology.area_width and topology.area_height:
        xmax, ymax = topology.area_width, topology.area_height
    elif n:
        xmax = max(float(coords[:, 0].max()), 1.0)
        ymax = max(float(coords[:, 1].max()), 1.0)
    else:
        xmax = ymax = 1.0
    xmin = min(0.0, float(coords[:, 0].min())) if n else 0.0
    ymin = min(0.0, float(coords[:, 1].min())) if n else 0.0
    scale = PLOT_WIDTH / (xmax - xmin)
    plot_h = (ymax - ymin) * scale
    width, height = PLOT_WIDTH + 2 * MARGIN, plot_h + 2 * MARGIN + 30

    def px(x, y):
        return MARGIN + (x - xmin) * scale, MARGIN + (ymax - y) * scale

    root = _svg(width, height)
    ET.SubElement(root, "title").text = f"{n} nodes, {len(solution.gateways)} gateways"
    _axes(root, MARGIN, MARGIN, MARGIN + PLOT_WIDTH, MARGIN + plot_h, "x [m]", "y [m]", xmax, ymax)

    links = ET.SubElement(root, "g", {"class": "links"})
    for s, g in sorted(solution.connections):
        sf = (link_sf or {}).get((s, g))
        x1, y1 = px(*coords[s])
        x2, y2 = px(*coords[g])
        attrs = {"class": "link", "x1": f"{x1:.2f}", "y1": f"{y1:.2f}", "x2": f"{x2:.2f}", "y2": f"{y2:.2f}",
                 "stroke": SF_COLORS.get(sf, "#999999"), "stroke-width": "1"}
        if sf is not None:
            attrs["data-sf"] = str(sf)
        ET.SubElement(links, "line", attrs)

    pts = ET.SubElement(root, "g", {"class": "nodes"})
    for v in range(n):
        if v in solution.gateways:
            continue
        x, y = px(*coords[v])
        ET.SubElement(pts, "circle", {"class": "station", "cx": f"{x:.2f}", "cy": f"{y:.2f}", "r": "2", "fill": "#3366cc"})
    for v in sorted(solution.gateways):
        x, y = px(*coords[v])
        ET.SubElement(pts, "circle", {"class": "gateway", "cx": f"{x:.2f}", "cy": f"{y:.2f}", "r": "5",
                                      "fill": "#000000", "stroke": "white"})

    legend = ET.SubElement(root, "g", {"class": "legend"})
    for i, sf in enumerate(SPREADING_FACTORS):
        x = MARGIN + 160 + i * 80
        y = height - 22
        ET.SubElement(legend, "rect", {"x": f"{x}", "y": f"{y - 10:g}", "width": "12", "height": "12", "fill": SF_COLORS[sf]})
        ET.SubElement(legend, "text", {"x": f"{x + 16}", "y": f"{y:g}", "font-size": "12"}).text = f"SF{sf}"
    return _serialize(root)


def sf_histogram_svg(histogram: dict[int, float], title: str = "") -> str:
    """Bar chart of the fraction of stations per best-link SF."""
    width, height = 560, 380
    x0, y0, x1, y1 = MARGIN, 40, width - 20, height - MARGIN
    root = _svg(width, height)
    ET.SubElement(root, "title").text = title or "SF distribution"
    top = max([0.0, *histogram.values()])
    ymax = 1.0 if top > 0.5 else 0.5
    _axes(root, x0, y0, x1, y1, "spreading factor", "fraction of stations", None, ymax)
    slot = (x1 - x0) / len(SPREADING_FACTORS)
    for i, sf in enumerate(SPREADING_FACTORS):
        frac = float(histogram.get(sf, 0.0))
        h = frac / ymax * (y1 - y0)
        x = x0 + i * slot + slot * 0.15
        ET.SubElement(root, "rect", {"class": "bar", "data-sf": str(sf), "x": f"{x:.2f}", "y": f"{y1 - h:.2f}",
                                     "width": f"{slot * 0.7:.2f}", "height": f"{h:.2f}", "fill": SF_COLORS[sf]})
        ET.SubElement(root, "text", {"x": f"{x + slot * 0.35:.2f}", "y": f"{y1 + 16:g}", "font-size": "12",
                                     "text-anchor": "middle"}).text = f"SF{sf}"
        if frac:
            ET.SubElement(root, "text", {"x": f"{x + slot * 0.35:.2f}", "y": f"{y1 - h - 4:.2f}", "font-size": "11",
                                         "text-anchor": "middle"}).text = f"{100 * frac:.1f}%"
    return _serialize(root)
