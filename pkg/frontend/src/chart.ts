/** Minimal SVG band chart: min/max shaded area, mean line, clickable dots.
 *
 * Only fetched points are drawn, so infeasible x values are unclickable gaps
 * by construction.
 */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface BandPoint {
  x: number;
  y_min: number;
  y_mean: number;
  y_max: number;
}

export interface Series {
  name: string;
  color: string;
  points: BandPoint[];
}

export interface ChartOptions {
  width?: number;
  height?: number;
  xLabel: string;
  yLabel: string;
  selected?: number | null;
  onClick?: (x: number, series: string) => void;
}

interface Scale {
  (v: number): number;
}

function makeScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (v: number) => outLo + ((v - lo) / span) * (outHi - outLo);
}

function el<K extends string>(name: K, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, name) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export function renderBandChart(container: HTMLElement, seriesList: Series[], options: ChartOptions): void {
  container.textContent = "";
  const width = options.width ?? 640;
  const height = options.height ?? 320;
  const margin = { top: 12, right: 16, bottom: 42, left: 64 };

  const allPoints = seriesList.flatMap((s) => s.points);
  if (allPoints.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent =
      "No feasible design in this range. Widen the range or relax the requirement.";
    container.appendChild(empty);
    return;
  }

  const xs = allPoints.map((p) => p.x);
  const yLo = Math.min(...allPoints.map((p) => p.y_min));
  const yHi = Math.max(...allPoints.map((p) => p.y_max));
  const sx = makeScale(Math.min(...xs), Math.max(...xs), margin.left, width - margin.right);
  const pad = (yHi - yLo || 1) * 0.06;
  const sy = makeScale(yLo - pad, yHi + pad, height - margin.bottom, margin.top);

  const svg = el("svg", { viewBox: `0 0 ${width} ${height}`, width, height, role: "img" });
  svg.classList.add("band-chart");

  // axes
  svg.appendChild(el("line", {
    x1: margin.left, y1: height - margin.bottom,
    x2: width - margin.right, y2: height - margin.bottom,
    class: "axis",
  }));
  svg.appendChild(el("line", {
    x1: margin.left, y1: margin.top, x2: margin.left, y2: height - margin.bottom,
    class: "axis",
  }));
  const xTicks = [...new Set(xs)].sort((a, b) => a - b);
  const tickEvery = Math.max(1, Math.ceil(xTicks.length / 12));
  xTicks.forEach((x, idx) => {
    if (idx % tickEvery !== 0) return;
    const gx = sx(x);
    svg.appendChild(el("line", {
      x1: gx, y1: height - margin.bottom, x2: gx, y2: height - margin.bottom + 4,
      class: "axis",
    }));
    const label = el("text", { x: gx, y: height - margin.bottom + 18, class: "tick" });
    label.textContent = String(x);
    svg.appendChild(label);
  });
  for (let t = 0; t <= 4; t += 1) {
    const v = yLo + ((yHi - yLo) * t) / 4;
    const gy = sy(v);
    const label = el("text", { x: margin.left - 8, y: gy + 4, class: "tick tick-y" });
    label.textContent = v >= 100 ? v.toFixed(0) : v.toPrecision(3);
    svg.appendChild(label);
  }
  const xLabel = el("text", { x: (margin.left + width - margin.right) / 2, y: height - 6, class: "axis-label" });
  xLabel.textContent = options.xLabel;
  svg.appendChild(xLabel);
  const yLabel = el("text", {
    x: 14, y: (margin.top + height - margin.bottom) / 2,
    class: "axis-label",
    transform: `rotate(-90 14 ${(margin.top + height - margin.bottom) / 2})`,
  });
  yLabel.textContent = options.yLabel;
  svg.appendChild(yLabel);

  for (const series of seriesList) {
    const pts = [...series.points].sort((a, b) => a.x - b.x);
    if (pts.length === 0) continue;
    const band = pts.map((p) => `${sx(p.x)},${sy(p.y_max)}`)
      .concat([...pts].reverse().map((p) => `${sx(p.x)},${sy(p.y_min)}`))
      .join(" ");
    const area = el("polygon", { points: band, fill: series.color, class: "band" });
    svg.appendChild(area);
    const line = el("polyline", {
      points: pts.map((p) => `${sx(p.x)},${sy(p.y_mean)}`).join(" "),
      fill: "none",
      stroke: series.color,
      class: "mean-line",
    });
    svg.appendChild(line);
    for (const p of pts) {
      const dot = el("circle", {
        cx: sx(p.x), cy: sy(p.y_mean), r: options.onClick ? 5 : 3,
        fill: series.color,
        class: "dot" + (options.selected === p.x ? " selected" : ""),
        "data-x": p.x,
        "data-series": series.name,
      });
      if (options.onClick) {
        dot.addEventListener("click", () => options.onClick?.(p.x, series.name));
        (dot as SVGElement & { style: CSSStyleDeclaration }).style.cursor = "pointer";
        const title = document.createElementNS(SVG_NS, "title");
        title.textContent =
          `${series.name} @ ${options.xLabel} = ${p.x}: mean ${p.y_mean.toPrecision(5)}` +
          ` [${p.y_min.toPrecision(5)}, ${p.y_max.toPrecision(5)}]`;
        dot.appendChild(title);
      }
      svg.appendChild(dot);
    }
  }

  container.appendChild(svg);

  if (seriesList.length > 1) {
    const legend = document.createElement("div");
    legend.className = "legend";
    for (const series of seriesList) {
      const item = document.createElement("span");
      item.className = "legend-item";
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.backgroundColor = series.color;
      item.appendChild(swatch);
      item.appendChild(document.createTextNode(series.name.replace(/_/g, " ")));
      legend.appendChild(item);
    }
    container.appendChild(legend);
  }
}
