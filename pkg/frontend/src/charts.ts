// Result rendering: every number shown is lifted verbatim from the API
// response (bins, counts, tau, standard error); nothing is recomputed.

import type { EffectPayload, EstimateResponse } from './types';

function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;');
}

export function formatNumber(value: number, digits = 2): string {
  return value.toLocaleString('en-US', {
    minimumFractionDigits: digits,
    maximumFractionDigits: digits,
  });
}

export function histogramSvg(
  effect: EffectPayload,
  width = 420,
  height = 180,
): string {
  const { counts, bin_edges: edges } = effect.histogram;
  const peak = Math.max(...counts, 1);
  const lo = edges[0];
  const hi = edges[edges.length - 1];
  const span = hi - lo || 1;
  const bars = counts.map((count, i) => {
    const x0 = ((edges[i] - lo) / span) * width;
    const x1 = ((edges[i + 1] - lo) / span) * width;
    const barHeight = (count / peak) * (height - 20);
    return (
      `<rect class="bar" data-count="${count}" x="${x0.toFixed(2)}" ` +
      `y="${(height - barHeight).toFixed(2)}" ` +
      `width="${Math.max(x1 - x0 - 1, 0.5).toFixed(2)}" ` +
      `height="${barHeight.toFixed(2)}"/>`
    );
  });
  return (
    `<svg class="histogram" viewBox="0 0 ${width} ${height}" ` +
    `xmlns="http://www.w3.org/2000/svg">${bars.join('')}` +
    `<text x="2" y="12" class="axis">${formatNumber(lo)}</text>` +
    `<text x="${width - 2}" y="12" text-anchor="end" class="axis">${formatNumber(hi)}</text>` +
    `</svg>`
  );
}

export function cumulativeSvg(
  effect: EffectPayload,
  width = 420,
  height = 180,
): string {
  const points = effect.cumulative;
  if (points.length === 0) return `<svg class="cumulative"></svg>`;
  const lo = points[0].value;
  const hi = points[points.length - 1].value;
  const span = hi - lo || 1;
  const path = points
    .map((p, i) => {
      const x = (((p.value - lo) / span) * width).toFixed(2);
      const y = ((1 - p.fraction) * (height - 10) + 5).toFixed(2);
      return `${i === 0 ? 'M' : 'L'} ${x} ${y}`;
    })
    .join(' ');
  return (
    `<svg class="cumulative" viewBox="0 0 ${width} ${height}" ` +
    `xmlns="http://www.w3.org/2000/svg"><path d="${path}" fill="none"/></svg>`
  );
}

export function effectSummaryHtml(response: EstimateResponse): string {
  const e = response.estimate;
  const rows: string[] = [
    `<div class="stat"><span class="label">effect (tau)</span>` +
      `<span class="value" id="tau-value" data-raw="${e.tau}">${formatNumber(e.tau)}</span>` +
      ` <span class="unit">kWh/a</span></div>`,
    `<div class="stat"><span class="label">standard error</span>` +
      `<span class="value" id="se-value" data-raw="${e.standard_error}">${formatNumber(e.standard_error)}</span></div>`,
    `<div class="stat"><span class="label">samples</span>` +
      `<span class="value" id="n-value">${e.n}</span></div>`,
  ];
  if (response.baseline) {
    rows.push(
      `<div class="stat baseline"><span class="label">naive model answer</span>` +
        `<span class="value" data-raw="${response.baseline.tau}">` +
        `${formatNumber(response.baseline.tau)}</span></div>`,
    );
  }
  if (response.oracle) {
    rows.push(
      `<div class="stat oracle"><span class="label">simulated truth (paired runs)</span>` +
        `<span class="value" data-raw="${response.oracle.mean}">` +
        `${formatNumber(response.oracle.mean)}</span></div>`,
    );
  }
  return `<div class="effect-summary">${rows.join('')}</div>`;
}

export function adjustmentSummaryHtml(
  sets: string[][],
  forbidden: string[],
  nullEffect: boolean,
): string {
  if (nullEffect) {
    return `<p class="estimand">No directed path: the effect is identically zero.</p>`;
  }
  const primary = sets.length
    ? sets[0].length
      ? sets[0].map(escapeXml).join(', ')
      : '∅ (nothing to adjust)'
    : 'none found';
  const alternatives = sets.length > 1 ? ` (+${sets.length - 1} alternative)` : '';
  const doNotAdjust = forbidden.length
    ? `<p class="forbidden">do not adjust: ${forbidden.map(escapeXml).join(', ')}</p>`
    : '';
  return (
    `<p class="estimand">adjust for: <strong>${primary}</strong>${alternatives}</p>` +
    doNotAdjust
  );
}
