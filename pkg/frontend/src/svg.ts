/**
 * Self-contained SVG line-chart rendering: no canvas, no chart library.
 *
 * Panels carry data-* attributes (series name, reference-line value) so the
 * structural tests can verify figures without rasterizing them.
 */

export interface Series {
  label: string;
  color: string;
  x: number[];
  y: number[];
  dash?: string;
}

export interface VLine {
  x: number;
  label: string;
  color?: string;
}

export interface PanelOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  vLines?: VLine[];
  width?: number;
  height?: number;
  logX?: boolean;
}

const MARGIN = { top: 34, right: 16, bottom: 42, left: 58 };
const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

export const METHOD_COLORS: Record<string, string> = {
  bonferroni: "#888888",
  bounded: "#d1495b",
  unbounded: "#1f6feb",
  coverage: "#2d6a4f",
};

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / (n * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Number(v.toPrecision(10)));
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

/** Render one chart panel as an `<svg>` fragment positioned at (ox, oy). */
export function renderPanel(opts: PanelOpts, ox = 0, oy = 0): string {
  const width = opts.width ?? 420;
  const height = opts.height ?? 300;
  const iw = width - MARGIN.left - MARGIN.right;
  const ih = height - MARGIN.top - MARGIN.bottom;

  const xsRaw = opts.series.flatMap((s) => s.x).concat(opts.vLines?.map((v) => v.x) ?? []);
  const tx = (v: number) => (opts.logX ? Math.log10(v) : v);
  const xs = xsRaw.map(tx);
  const ys = opts.series.flatMap((s) => s.y);
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(0, ...ys);
  let yHi = Math.max(...ys);
  if (xHi === xLo) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  if (yHi === yLo) yHi = yLo + 1;
  yHi += 0.05 * (yHi - yLo);

  const px = (v: number) => MARGIN.left + ((tx(v) - xLo) / (xHi - xLo)) * iw;
  const py = (v: number) => MARGIN.top + ih - ((v - yLo) / (yHi - yLo)) * ih;

  const parts: string[] = [];
  parts.push(`<g transform="translate(${ox},${oy})" data-panel="${esc(opts.title)}">`);
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${iw}" height="${ih}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${width / 2}" y="18" text-anchor="middle" font-size="13" ${FONT}>${esc(opts.title)}</text>`,
  );

  const xTickVals = opts.logX
    ? niceTicks(xLo, xHi, 5).map((v) => Math.pow(10, v))
    : niceTicks(xLo, xHi, 5);
  for (const v of xTickVals) {
    const x = px(v);
    if (x < MARGIN.left - 1 || x > MARGIN.left + iw + 1) continue;
    parts.push(`<line x1="${x}" y1="${MARGIN.top + ih}" x2="${x}" y2="${MARGIN.top + ih + 4}" stroke="#333"/>`);
    parts.push(
      `<text x="${x}" y="${MARGIN.top + ih + 16}" text-anchor="middle" font-size="10" ${FONT} data-xtick="${v}">${fmt(v)}</text>`,
    );
  }
  for (const v of niceTicks(yLo, yHi, 5)) {
    const y = py(v);
    if (y < MARGIN.top - 1 || y > MARGIN.top + ih + 1) continue;
    parts.push(`<line x1="${MARGIN.left - 4}" y1="${y}" x2="${MARGIN.left}" y2="${y}" stroke="#333"/>`);
    parts.push(
      `<text x="${MARGIN.left - 7}" y="${y + 3}" text-anchor="end" font-size="10" ${FONT}>${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + iw / 2}" y="${height - 8}" text-anchor="middle" font-size="11" ${FONT} data-axis="x">${esc(opts.xLabel)}</text>`,
  );
  parts.push(
    `<text x="14" y="${MARGIN.top + ih / 2}" text-anchor="middle" font-size="11" ${FONT} data-axis="y" transform="rotate(-90 14 ${MARGIN.top + ih / 2})">${esc(opts.yLabel)}</text>`,
  );

  for (const v of opts.vLines ?? []) {
    const x = px(v.x);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + ih}" stroke="${v.color ?? "#555"}" stroke-dasharray="3,3" data-refline="${v.x}"/>`,
    );
    parts.push(
      `<text x="${x + 4}" y="${MARGIN.top + 12}" font-size="10" fill="${v.color ?? "#555"}" ${FONT}>${esc(v.label)}</text>`,
    );
  }

  opts.series.forEach((s, i) => {
    const pts = s.x
      .map((xv, j) => [xv, s.y[j]] as const)
      .sort((a, b) => tx(a[0]) - tx(b[0]));
    const path = pts.map(([xv, yv]) => `${px(xv).toFixed(2)},${py(yv).toFixed(2)}`).join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<g data-series="${esc(s.label)}"><polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="1.6"${dash}/></g>`,
    );
    for (const [xv, yv] of pts) {
      parts.push(`<circle cx="${px(xv).toFixed(2)}" cy="${py(yv).toFixed(2)}" r="2.2" fill="${s.color}"/>`);
    }
    // legend, top-right of panel
    const lx = MARGIN.left + iw - 118;
    const ly = MARGIN.top + 12 + 14 * i;
    parts.push(`<line x1="${lx}" y1="${ly - 3}" x2="${lx + 18}" y2="${ly - 3}" stroke="${s.color}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${lx + 23}" y="${ly}" font-size="10" ${FONT}>${esc(s.label)}</text>`);
  });

  parts.push("</g>");
  return parts.join("\n");
}

/** Compose panels into a grid and wrap them in a complete SVG document. */
export function renderFigure(
  panels: PanelOpts[],
  columns: number,
  panelWidth = 420,
  panelHeight = 300,
): string {
  const rows = Math.ceil(panels.length / columns);
  const width = columns * panelWidth;
  const height = rows * panelHeight;
  const body = panels
    .map((p, i) => {
      const ox = (i % columns) * panelWidth;
      const oy = Math.floor(i / columns) * panelHeight;
      return renderPanel({ ...p, width: panelWidth, height: panelHeight }, ox, oy);
    })
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
