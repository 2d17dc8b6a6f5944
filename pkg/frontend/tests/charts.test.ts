import { describe, expect, it } from 'vitest';

import {
  adjustmentSummaryHtml,
  cumulativeSvg,
  effectSummaryHtml,
  histogramSvg,
} from '../src/charts';
import type { EffectPayload, EstimateResponse } from '../src/types';

function effect(): EffectPayload {
  // 40 bins whose counts sum to the sample count, as the API guarantees.
  const counts = new Array(40).fill(0).map((_, i) => (i % 4 === 0 ? 46 : 1));
  const total = counts.reduce((a, b) => a + b, 0);
  const edges = new Array(41).fill(0).map((_, i) => 100 + i * 20);
  return {
    tau: 2765.31,
    standard_error: 5.78,
    n: total,
    scenario: {
      treatment: 'Height',
      control: 3,
      treat: 3.2,
      outcome: 'Heating_Load',
      conditions: {},
      n_samples: total,
    },
    histogram: { counts, bin_edges: edges },
    cumulative: [
      { value: 100, fraction: 0.01 },
      { value: 500, fraction: 0.5 },
      { value: 900, fraction: 1.0 },
    ],
  };
}

describe('histogramSvg', () => {
  it('renders one bar per bin with counts attached verbatim', () => {
    const svg = histogramSvg(effect());
    const bars = svg.match(/<rect class="bar"/g) ?? [];
    expect(bars.length).toBe(40);
    const counts = [...svg.matchAll(/data-count="(\d+)"/g)].map((m) => Number(m[1]));
    expect(counts.reduce((a, b) => a + b, 0)).toBe(effect().n);
  });
});

describe('cumulativeSvg', () => {
  it('draws a monotone path over the response points', () => {
    const svg = cumulativeSvg(effect());
    expect(svg).toContain('<path d="M');
    const segments = svg.match(/L /g) ?? [];
    expect(segments.length).toBe(2);
  });
});

describe('effectSummaryHtml', () => {
  it('shows tau exactly as delivered by the API', () => {
    const response: EstimateResponse = {
      graph_id: 'g-1',
      seed: 3,
      estimate: effect(),
      estimand: {
        treatment: 'Height',
        outcome: 'Heating_Load',
        null_effect: false,
        minimal_adjustment_sets: [[]],
        forbidden_nodes: ['Volume'],
        paths: [],
      },
      node_r_squared: {},
    };
    const html = effectSummaryHtml(response);
    // The raw response value is carried untouched on the element.
    expect(html).toContain('data-raw="2765.31"');
    expect(html).toContain('2,765.31');
  });

  it('includes baseline and oracle rows when present', () => {
    const response: EstimateResponse = {
      graph_id: 'g-1',
      seed: 3,
      estimate: effect(),
      estimand: {
        treatment: 'Height',
        outcome: 'Heating_Load',
        null_effect: false,
        minimal_adjustment_sets: [[]],
        forbidden_nodes: [],
        paths: [],
      },
      node_r_squared: {},
      baseline: { ...effect(), tau: 3702.0 },
      oracle: { mean: 2953.3, std: 248.0, n: 200 },
    };
    const html = effectSummaryHtml(response);
    expect(html).toContain('data-raw="3702"');
    expect(html).toContain('data-raw="2953.3"');
  });
});

describe('adjustmentSummaryHtml', () => {
  it('renders the empty set as nothing-to-adjust', () => {
    const html = adjustmentSummaryHtml([[]], ['Volume', 'Window_Area'], false);
    expect(html).toContain('∅');
    expect(html).toContain('do not adjust: Volume, Window_Area');
  });

  it('renders the null-effect message', () => {
    const html = adjustmentSummaryHtml([], [], true);
    expect(html).toContain('identically zero');
  });

  it('lists the primary set with alternatives count', () => {
    const html = adjustmentSummaryHtml(
      [
        ['Ground_Floor_Area', 'Height', 'Number_of_Floors', 'WWR'],
        ['A', 'B', 'C', 'D', 'E', 'F'],
      ],
      [],
      false,
    );
    expect(html).toContain('Ground_Floor_Area, Height, Number_of_Floors, WWR');
    expect(html).toContain('+1 alternative');
  });
});
