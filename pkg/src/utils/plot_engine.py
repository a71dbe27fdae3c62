"""
Static line plots for the capacity experiments.

The same layout is rendered two ways: a self-contained SVG document built as an
lxml element tree (no stylesheets, fonts or images referenced), and an optional
PNG drawn with Pillow.
"""
import math
import os
from dataclasses import dataclass

from lxml import etree
from PIL import Image, ImageDraw, ImageFont

SVG_NS = "http://www.w3.org/2000/svg"
WIDTH, HEIGHT = 720, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 190, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


@dataclass(frozen=True)
class LineSeries:
    label: str
    xs: tuple
    ys: tuple


def cdf_series(label: str, cdf) -> LineSeries:
    """Staircase outline of an EmpiricalCdf, starting from probability 0."""
    xs, ys = [], []
    previous = 0.0
    for capacity, probability in cdf.points:
        xs += [capacity, capacity]
        ys += [previous, probability]
        previous = probability
    return LineSeries(label, tuple(xs), tuple(ys))


def _nice_step(span: float, count: int) -> float:
    raw = span / count
    magnitude = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * magnitude >= raw:
            return m * magnitude
    return 10 * magnitude


def _axis(values, count: int = 5):
    """
    Returns:
        tuple: (lo, hi, ticks) with ticks on a 1/2/5 grid covering `values`.
    """
    lo, hi = min(values), max(values)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    step = _nice_step(hi - lo, count)
    lo = math.floor(lo / step) * step
    hi = math.ceil(hi / step) * step
    ticks = [lo + k * step for k in range(int(round((hi - lo) / step)) + 1)]
    return lo, hi, ticks


def _tick_label(value: float) -> str:
    return f"{value:.6g}" if abs(value) > 1e-12 else "0"


@dataclass(frozen=True)
class _Layout:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    x_ticks: list
    y_ticks: list

    @property
    def plot_width(self) -> int:
        return WIDTH - MARGIN_LEFT - MARGIN_RIGHT

    @property
    def plot_height(self) -> int:
        return HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(self, x: float) -> float:
        return MARGIN_LEFT + (x - self.x_lo) / (self.x_hi - self.x_lo) * self.plot_width

    def py(self, y: float) -> float:
        return MARGIN_TOP + (self.y_hi - y) / (self.y_hi - self.y_lo) * self.plot_height


def _layout(series: list, y_range=None) -> _Layout:
    if not series or not any(s.xs for s in series):
        raise ValueError("nothing to plot")
    xs = [x for s in series for x in s.xs]
    ys = [y for s in series for y in s.ys]
    x_lo, x_hi, x_ticks = _axis(xs)
    if y_range is not None:
        y_lo, y_hi = y_range
        y_ticks = [y_lo + k * (y_hi - y_lo) / 4 for k in range(5)]
    else:
        y_lo, y_hi, y_ticks = _axis(ys)
    return _Layout(x_lo, x_hi, y_lo, y_hi, x_ticks, y_ticks)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def render_svg(series: list, path, title: str, x_label: str, y_label: str, y_range=None) -> str:
    """
    Writes one polyline per series with ticks, axis labels and a legend.

    Returns:
        str: The path to the saved file.
    """
    layout = _layout(series, y_range)
    svg = etree.Element(f"{{{SVG_NS}}}svg", nsmap={None: SVG_NS}, attrib={
        "width": str(WIDTH), "height": str(HEIGHT), "viewBox": f"0 0 {WIDTH} {HEIGHT}",
    })

    def sub(tag, text=None, **attrib):
        el = etree.SubElement(svg, f"{{{SVG_NS}}}{tag}", attrib={k.replace("_", "-"): str(v) for k, v in attrib.items()})
        if text is not None:
            el.text = text
        return el

    sub("rect", x=0, y=0, width=WIDTH, height=HEIGHT, fill="#ffffff")
    sub("text", title, x=_fmt(MARGIN_LEFT + layout.plot_width / 2), y=24, text_anchor="middle",
        font_family="sans-serif", font_size=16)

    bottom, left = MARGIN_TOP + layout.plot_height, MARGIN_LEFT
    for x in layout.x_ticks:
        px = _fmt(layout.px(x))
        sub("line", x1=px, y1=bottom, x2=px, y2=MARGIN_TOP, stroke="#e0e0e0", stroke_width=1)
        sub("text", _tick_label(x), x=px, y=bottom + 18, text_anchor="middle", font_family="sans-serif", font_size=11)
    for y in layout.y_ticks:
        py = _fmt(layout.py(y))
        sub("line", x1=left, y1=py, x2=left + layout.plot_width, y2=py, stroke="#e0e0e0", stroke_width=1)
        sub("text", _tick_label(y), x=left - 8, y=py, text_anchor="end", dominant_baseline="middle",
            font_family="sans-serif", font_size=11)
    sub("rect", x=left, y=MARGIN_TOP, width=layout.plot_width, height=layout.plot_height,
        fill="none", stroke="#000000", stroke_width=1)

    sub("text", x_label, x=_fmt(left + layout.plot_width / 2), y=HEIGHT - 16, text_anchor="middle",
        font_family="sans-serif", font_size=13)
    y_mid = _fmt(MARGIN_TOP + layout.plot_height / 2)
    sub("text", y_label, x=18, y=y_mid, text_anchor="middle", transform=f"rotate(-90 18 {y_mid})",
        font_family="sans-serif", font_size=13)

    legend_x = left + layout.plot_width + 16
    for i, s in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{_fmt(layout.px(x))},{_fmt(layout.py(y))}" for x, y in zip(s.xs, s.ys))
        sub("polyline", points=points, fill="none", stroke=colour, stroke_width=2)
        ly = MARGIN_TOP + 12 + 20 * i
        sub("line", x1=legend_x, y1=ly, x2=legend_x + 24, y2=ly, stroke=colour, stroke_width=2)
        sub("text", s.label, x=legend_x + 30, y=ly, dominant_baseline="middle", font_family="sans-serif", font_size=11)

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as f:
        f.write(etree.tostring(svg, xml_declaration=True, encoding="UTF-8", pretty_print=True))
    return str(path)


def _font(size: int):
    try:
        return ImageFont.truetype("DejaVuSans.ttf", size)
    except OSError:
        return ImageFont.load_default()


def _text(draw, xy, text: str, font, anchor: str = "lt"):
    """Places text by a two-letter anchor (l/m/r, t/m) without relying on font anchor support."""
    box = draw.textbbox((0, 0), text, font=font)
    w, h = box[2] - box[0], box[3] - box[1]
    x, y = xy
    x -= {"l": 0, "m": w / 2, "r": w}[anchor[0]]
    y -= {"t": 0, "m": h / 2}[anchor[1]]
    draw.text((x - box[0], y - box[1]), text, fill="black", font=font)


def render_png(series: list, path, title: str, x_label: str, y_label: str, y_range=None) -> str:
    layout = _layout(series, y_range)
    img = Image.new("RGB", (WIDTH, HEIGHT), "white")
    draw = ImageDraw.Draw(img)
    font, title_font = _font(11), _font(16)

    bottom, left, right = MARGIN_TOP + layout.plot_height, MARGIN_LEFT, MARGIN_LEFT + layout.plot_width
    for x in layout.x_ticks:
        px = layout.px(x)
        draw.line([(px, MARGIN_TOP), (px, bottom)], fill="#e0e0e0")
        _text(draw, (px, bottom + 6), _tick_label(x), font, "mt")
    for y in layout.y_ticks:
        py = layout.py(y)
        draw.line([(left, py), (right, py)], fill="#e0e0e0")
        _text(draw, (left - 8, py), _tick_label(y), font, "rm")
    draw.rectangle([left, MARGIN_TOP, right, bottom], outline="black")

    _text(draw, ((left + right) / 2, 14), title, title_font, "mt")
    _text(draw, ((left + right) / 2, HEIGHT - 22), x_label, font, "mt")

    # rotated y label on its own transparent layer
    label_box = draw.textbbox((0, 0), y_label, font=font)
    label = Image.new("RGBA", (label_box[2] - label_box[0] + 4, label_box[3] - label_box[1] + 4), (255, 255, 255, 0))
    ImageDraw.Draw(label).text((2, 2), y_label, fill="black", font=font)
    label = label.rotate(90, expand=True)
    img.paste(label, (8, int(MARGIN_TOP + layout.plot_height / 2 - label.size[1] / 2)), label)

    legend_x = right + 16
    for i, s in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        points = [(layout.px(x), layout.py(y)) for x, y in zip(s.xs, s.ys)]
        if len(points) > 1:
            draw.line(points, fill=colour, width=2)
        else:
            draw.point(points, fill=colour)
        ly = MARGIN_TOP + 12 + 20 * i
        draw.line([(legend_x, ly), (legend_x + 24, ly)], fill=colour, width=2)
        _text(draw, (legend_x + 30, ly), s.label, font, "lm")

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    img.save(path, "PNG")
    return str(path)
