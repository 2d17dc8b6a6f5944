// Round-trip tests against the real backend (booted by serverSetup).
// These cover the UI acceptance path: edge edits persist through the
// constraints endpoint and survive a reload, and displayed numbers equal
// the raw API response fields.

import { beforeAll, describe, expect, it } from 'vitest';

import { CausalDesignClient } from '../src/api';
import { effectSummaryHtml, histogramSvg } from '../src/charts';
import { GraphViewState, pairKey } from '../src/graphState';
import { highlightsFromEstimand } from '../src/graphView';
import { ScenarioFormState } from '../src/scenarioForm';
import type { DiscoverResponse, EstimateResponse } from '../src/types';

const TABLE_CONDITIONS: Record<string, number> = {
  Ground_Floor_Area: 300,
  Number_of_Floors: 3,
  WWR: 0.3,
  u_Value_Roof: 0.2,
  u_Value_Ground_Floor: 0.2,
  Permeability: 7.5,
};

let client: CausalDesignClient;
let datasetId: string;
let discovered: DiscoverResponse;
let schema: Awaited<ReturnType<CausalDesignClient['generateDataset']>>['schema'];

beforeAll(async () => {
  const base = process.env.CAUSALDESIGN_API;
  if (!base) throw new Error('backend not booted (CAUSALDESIGN_API unset)');
  client = new CausalDesignClient(base);
  const dataset = await client.generateDataset(1000, 7, 0.005);
  datasetId = dataset.dataset_id;
  schema = dataset.schema;
  discovered = await client.discover(datasetId);
});

describe('edge edit round trip', () => {
  it('removing the facade/window edge persists and survives reload', async () => {
    const view = new GraphViewState(discovered.cpdag);
    expect(view.edge('External_Wall_Area', 'Window_Area')).toBeDefined();
    view.setEdgeState('External_Wall_Area', 'Window_Area', { kind: 'removed' });
    const payload = view.constraintsPayload();
    expect(payload.forbidden).toEqual([
      ['External_Wall_Area', 'Window_Area'],
      ['Window_Area', 'External_Wall_Area'],
    ]);

    const applied = await client.applyConstraints(discovered.graph_id, payload);
    expect(applied.graph_id).not.toBe(discovered.graph_id);

    // Reload: a fresh fetch of the new version renders without the edge.
    const reloaded = await client.getGraph(applied.graph_id);
    const fresh = new GraphViewState(reloaded.graph);
    expect(fresh.edge('External_Wall_Area', 'Window_Area')).toBeUndefined();

    // The earlier version is immutable: it still has the adjacency.
    const original = await client.getGraph(discovered.graph_id);
    const originalView = new GraphViewState(original.graph);
    expect(originalView.edge('External_Wall_Area', 'Window_Area')).toBeDefined();
  });

  it('server-applied orientations render identically after refetch', async () => {
    const reloadedTwice = await Promise.all([
      client.getGraph(discovered.graph_id),
      client.getGraph(discovered.graph_id),
    ]);
    const [a, b] = reloadedTwice.map((r) => new GraphViewState(r.graph));
    expect(a.edgeViews()).toEqual(b.edgeViews());
  });

  it('contradictory edits surface the backend error verbatim', async () => {
    const view = new GraphViewState(discovered.cpdag);
    const someDirected = discovered.cpdag.directed[0];
    const [from, to] = someDirected;
    view.setEdgeState(from, to, { kind: 'directed', from: to, to: from });
    await expect(
      client.applyConstraints(discovered.graph_id, view.constraintsPayload()),
    ).rejects.toMatchObject({ status: 409 });
  });
});

describe('what-if submission', () => {
  let pruned: string;
  let response: EstimateResponse;

  beforeAll(async () => {
    // The expert step: remove the adjacencies among derived geometry that
    // the data cannot justify, then submit the reference what-if.
    const view = new GraphViewState(discovered.cpdag);
    const removable = [
      ['External_Wall_Area', 'Window_Area'],
      ['Volume', 'Window_Area'],
      ['External_Wall_Area', 'Volume'],
    ] as const;
    for (const [a, b] of removable) {
      if (view.edge(a, b)) view.setEdgeState(a, b, { kind: 'removed' });
    }
    const applied = await client.applyConstraints(
      discovered.graph_id,
      view.constraintsPayload(),
    );
    pruned = applied.graph_id;

    const form = new ScenarioFormState(schema);
    form.setTreatment('Height');
    form.controlValue = 3.0;
    form.treatValue = 3.2;
    for (const [name, value] of Object.entries(TABLE_CONDITIONS)) {
      form.setCondition(name, true, value);
    }
    form.nSamples = 800;
    form.seed = 3;
    const request = form.buildRequest();
    expect(request).not.toBeNull();
    response = await client.estimate(pruned, {
      scenario: request!,
      seed: form.seed,
      include_oracle: true,
      oracle_samples: 100,
    });
  });

  it('displays tau exactly as the API returned it', () => {
    const html = effectSummaryHtml(response);
    expect(html).toContain(`data-raw="${response.estimate.tau}"`);
  });

  it('histogram bins sum to the requested sample count', () => {
    const counts = response.estimate.histogram.counts;
    expect(counts.reduce((a, b) => a + b, 0)).toBe(800);
    const svg = histogramSvg(response.estimate);
    const rendered = [...svg.matchAll(/data-count="(\d+)"/g)].map((m) =>
      Number(m[1]),
    );
    expect(rendered.reduce((a, b) => a + b, 0)).toBe(800);
  });

  it('oracle validation row is available for generated data', () => {
    expect(response.oracle).toBeDefined();
    expect(response.oracle!.n).toBe(100);
    const relative =
      Math.abs(response.estimate.tau - response.oracle!.mean) /
      response.oracle!.mean;
    expect(relative).toBeLessThan(0.15);
  });

  it('identify marks the derived geometry as do-not-adjust', async () => {
    const identify = await client.identify(pruned, 'Height', 'Heating_Load');
    const highlights = highlightsFromEstimand(identify.estimand);
    for (const node of ['Volume', 'External_Wall_Area', 'Window_Area']) {
      expect(highlights.forbidden.has(node)).toBe(true);
    }
    expect(identify.estimand.minimal_adjustment_sets[0]).toEqual([]);
  });

  it('the query timeline records the submission', async () => {
    const info = await client.datasetInfo(datasetId);
    const estimates = info.queries.filter((q) => q.kind === 'estimate');
    expect(estimates.length).toBeGreaterThan(0);
    expect(info.graphs.some((g) => g.graph_id === pruned)).toBe(true);
  });
});

describe('identify on the window-area scenario', () => {
  it('returns the published adjustment set through the client', async () => {
    const view = new GraphViewState(discovered.cpdag);
    for (const pair of [
      ['External_Wall_Area', 'Window_Area'],
      ['Volume', 'Window_Area'],
      ['External_Wall_Area', 'Volume'],
    ] as const) {
      if (view.edge(pair[0], pair[1])) {
        view.setEdgeState(pair[0], pair[1], { kind: 'removed' });
      }
    }
    const applied = await client.applyConstraints(
      discovered.graph_id,
      view.constraintsPayload(),
    );
    const identify = await client.identify(
      applied.graph_id,
      'Window_Area',
      'Heating_Load',
    );
    expect(identify.estimand.minimal_adjustment_sets[0]).toEqual([
      'Ground_Floor_Area',
      'Height',
      'Number_of_Floors',
      'WWR',
    ]);
    const highlights = highlightsFromEstimand(identify.estimand);
    expect(highlights.openBackdoorEdges.size).toBeGreaterThan(0);
    expect(pairKey('a', 'b')).toBeDefined();
  });
});
