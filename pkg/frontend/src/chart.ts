// Evolving-values chart: the banker's offer against the continuation
// certainty equivalents per gamma, round by round. Money on the y axis.
// Pure string builder so it is testable without a DOM.

export interface ChartSeries {
  label: string;
  values: (number | null)[]; // one per round, null = not computed
  dashed?: boolean;
}

export interface ChartInput {
  roundLabels: number[];
  offers: (number | null)[];
  series: ChartSeries[];
  width?: number;
  height?: number;
}

const PALETTE = ["#2563eb", "#059669", "#d97706", "#dc2626", "#7c3aed", "#0891b2"];
const MARGIN = { top: 16, right: 132, bottom: 28, left: 64 };

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / count));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / chosen) * chosen; t <= hi; t += chosen) ticks.push(t);
  return ticks;
}

function compactMoney(value: number): string {
  if (Math.abs(value) >= 1e6) return `${value / 1e6}M`;
  if (Math.abs(value) >= 1e3) return `${value / 1e3}k`;
  return `${value}`;
}

export function buildChart(input: ChartInput): string {
  const width = input.width ?? 640;
  const height = input.height ?? 300;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const everything = [
    ...input.offers.filter((v): v is number => v !== null),
    ...input.series.flatMap((s) => s.values.filter((v): v is number => v !== null)),
  ];
  if (everything.length === 0 || input.roundLabels.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"><text x="16" y="24" class="chart-empty">no rounds yet</text></svg>`;
  }
  let lo = Math.min(...everything);
  let hi = Math.max(...everything);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * 0.06;
  lo -= pad;
  hi += pad;

  const n = input.roundLabels.length;
  const x = (i: number) => MARGIN.left + (n === 1 ? plotW / 2 : (plotW * i) / (n - 1));
  const y = (v: number) => MARGIN.top + plotH - ((v - lo) / (hi - lo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img">`
  );

  for (const tick of niceTicks(lo, hi, 5)) {
    const ty = y(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${ty}" x2="${width - MARGIN.right}" y2="${ty}" class="chart-grid"/>`,
      `<text x="${MARGIN.left - 6}" y="${ty + 4}" text-anchor="end" class="chart-tick">${compactMoney(tick)}</text>`
    );
  }
  input.roundLabels.forEach((label, i) => {
    parts.push(
      `<text x="${x(i)}" y="${height - 8}" text-anchor="middle" class="chart-tick">r${label}</text>`
    );
  });

  const drawLine = (values: (number | null)[], stroke: string, dashed: boolean, cls: string) => {
    const points = values
      .map((v, i) => (v === null ? null : `${x(i).toFixed(1)},${y(v).toFixed(1)}`))
      .filter((p): p is string => p !== null);
    if (points.length === 0) return;
    const dash = dashed ? ` stroke-dasharray="6 4"` : "";
    parts.push(
      `<polyline class="${cls}" fill="none" stroke="${stroke}" stroke-width="2"${dash} points="${points.join(" ")}"/>`
    );
    values.forEach((v, i) => {
      if (v !== null) {
        parts.push(`<circle cx="${x(i).toFixed(1)}" cy="${y(v).toFixed(1)}" r="2.5" fill="${stroke}"/>`);
      }
    });
  };

  drawLine(input.offers, "#111827", false, "chart-offer");
  input.series.forEach((s, idx) => {
    drawLine(s.values, PALETTE[idx % PALETTE.length]!, s.dashed ?? false, "chart-ce");
  });

  const legendX = width - MARGIN.right + 10;
  let legendY = MARGIN.top + 8;
  const legendEntry = (label: string, color: string, dashed: boolean) => {
    const dash = dashed ? ` stroke-dasharray="6 4"` : "";
    parts.push(
      `<line x1="${legendX}" y1="${legendY - 4}" x2="${legendX + 18}" y2="${legendY - 4}" stroke="${color}" stroke-width="2"${dash}/>`,
      `<text x="${legendX + 24}" y="${legendY}" class="chart-legend">${label}</text>`
    );
    legendY += 16;
  };
  legendEntry("offer", "#111827", false);
  input.series.forEach((s, idx) => legendEntry(s.label, PALETTE[idx % PALETTE.length]!, s.dashed ?? false));

  parts.push("</svg>");
  return parts.join("");
}
