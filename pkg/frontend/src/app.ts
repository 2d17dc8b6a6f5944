// Application wiring: mounts the views, binds events, keeps at most one
// estimate in flight, and round-trips every edit through the server so the
// session history stays authoritative.

import { ApiError, CausalDesignClient } from './api';
import {
  adjustmentSummaryHtml,
  cumulativeSvg,
  effectSummaryHtml,
  histogramSvg,
} from './charts';
import { GraphViewState } from './graphState';
import {
  emptyHighlights,
  highlightsFromEstimand,
  renderGraphSvg,
  type GraphHighlights,
} from './graphView';
import { forceLayout, type Point } from './layout';
import { ScenarioFormState } from './scenarioForm';
import { timelineHtml } from './timeline';
import type { ColumnDescriptor, EstimandPayload } from './types';

interface AppState {
  client: CausalDesignClient;
  datasetId: string | null;
  graphId: string | null;
  schema: ColumnDescriptor[];
  view: GraphViewState | null;
  positions: Map<string, Point>;
  highlights: GraphHighlights;
  form: ScenarioFormState | null;
  busy: boolean;
}

const state: AppState = {
  client: new CausalDesignClient(
    (window as unknown as { API_BASE?: string }).API_BASE ?? 'http://127.0.0.1:8080',
  ),
  datasetId: null,
  graphId: null,
  schema: [],
  view: null,
  positions: new Map(),
  highlights: emptyHighlights(),
  form: null,
  busy: false,
};

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
}

function setStatus(text: string, isError = false): void {
  const status = byId<HTMLDivElement>('status');
  status.textContent = text;
  status.className = isError ? 'status error' : 'status';
}

async function guarded(label: string, action: () => Promise<void>): Promise<void> {
  if (state.busy) return;
  state.busy = true;
  document.body.classList.add('busy');
  setStatus(`${label}…`);
  try {
    await action();
    setStatus('ready');
  } catch (error) {
    // API errors are surfaced verbatim, field names included.
    const message = error instanceof ApiError ? error.detail : String(error);
    setStatus(message, true);
  } finally {
    state.busy = false;
    document.body.classList.remove('busy');
  }
}

function renderGraph(): void {
  if (!state.view) return;
  byId('graph-host').innerHTML = renderGraphSvg(
    state.view,
    state.positions,
    state.highlights,
  );
  byId('pending-count').textContent = String(state.view.pendingCount());
  for (const view of state.view.edgeViews()) {
    const element = document.getElementById(`edge:${view.a}|${view.b}`);
    if (!element) continue;
    element.addEventListener('click', () => {
      state.view!.cycleEdge(view.a, view.b);
      renderGraph();
    });
  }
}

async function loadGraph(graphId: string): Promise<void> {
  const response = await state.client.getGraph(graphId);
  state.graphId = graphId;
  state.view = new GraphViewState(response.graph);
  state.positions = forceLayout(response.graph, { seed: 11 });
  state.highlights = emptyHighlights();
  byId('graph-id').textContent = graphId;
  renderGraph();
  await refreshTimeline();
}

async function refreshTimeline(): Promise<void> {
  if (!state.datasetId) return;
  const info = await state.client.datasetInfo(state.datasetId);
  byId('timeline-host').innerHTML = timelineHtml(info);
  for (const item of Array.from(
    document.querySelectorAll<HTMLLIElement>('.timeline li[data-graph]'),
  )) {
    item.addEventListener('click', () => {
      void guarded('loading graph version', () => loadGraph(item.dataset.graph!));
    });
  }
}

function renderForm(): void {
  if (!state.form) return;
  const form = state.form;
  const select = byId<HTMLSelectElement>('treatment-select');
  select.innerHTML =
    '<option value="">— choose treatment —</option>' +
    form
      .treatmentChoices()
      .map((name) => `<option value="${name}">${name}</option>`)
      .join('');
  select.value = form.treatment;
  const rows = form.sliders
    .map((spec) => {
      const disabled = spec.name === form.treatment ? 'disabled' : '';
      const checked = spec.enabled ? 'checked' : '';
      return (
        `<div class="condition-row">` +
        `<label><input type="checkbox" data-name="${spec.name}" ${checked} ${disabled}/>` +
        `${spec.name} <span class="unit">${spec.unit}</span></label>` +
        `<input type="range" data-slider="${spec.name}" min="${spec.min}" ` +
        `max="${spec.max}" step="any" value="${spec.value}" ${spec.enabled ? '' : 'disabled'}/>` +
        `<span class="slider-value">${spec.value.toFixed(2)}</span>` +
        `</div>`
      );
    })
    .join('');
  byId('conditions-host').innerHTML = rows;
  for (const checkbox of Array.from(
    document.querySelectorAll<HTMLInputElement>('#conditions-host input[type=checkbox]'),
  )) {
    checkbox.addEventListener('change', () => {
      form.setCondition(checkbox.dataset.name!, checkbox.checked);
      renderForm();
    });
  }
  for (const slider of Array.from(
    document.querySelectorAll<HTMLInputElement>('#conditions-host input[type=range]'),
  )) {
    slider.addEventListener('input', () => {
      form.setCondition(slider.dataset.slider!, true, Number(slider.value));
      slider.parentElement!.querySelector('.slider-value')!.textContent = Number(
        slider.value,
      ).toFixed(2);
    });
  }
}

function showValidation(issues: { field: string; message: string }[]): void {
  byId('form-issues').innerHTML = issues
    .map((issue) => `<li>${issue.field}: ${issue.message}</li>`)
    .join('');
}

function bindActions(): void {
  byId<HTMLButtonElement>('generate-button').addEventListener('click', () => {
    void guarded('generating dataset', async () => {
      const n = Number(byId<HTMLInputElement>('gen-n').value);
      const seed = Number(byId<HTMLInputElement>('gen-seed').value);
      const response = await state.client.generateDataset(n, seed, 0.005);
      state.datasetId = response.dataset_id;
      state.schema = response.schema;
      state.form = new ScenarioFormState(response.schema);
      byId('dataset-id').textContent = response.dataset_id;
      renderForm();
      await refreshTimeline();
    });
  });

  byId<HTMLButtonElement>('discover-button').addEventListener('click', () => {
    void guarded('running structure discovery', async () => {
      if (!state.datasetId) throw new Error('generate a dataset first');
      const response = await state.client.discover(state.datasetId);
      await loadGraph(response.graph_id);
    });
  });

  byId<HTMLButtonElement>('apply-edits-button').addEventListener('click', () => {
    void guarded('applying edits', async () => {
      if (!state.view || !state.graphId) throw new Error('no graph loaded');
      const payload = state.view.constraintsPayload();
      if (
        payload.required.length === 0 &&
        payload.forbidden.length === 0 &&
        payload.tiers.length === 0
      ) {
        throw new Error('no pending edits');
      }
      const response = await state.client.applyConstraints(state.graphId, payload);
      await loadGraph(response.graph_id);
    });
  });

  byId<HTMLButtonElement>('identify-button').addEventListener('click', () => {
    void guarded('identifying estimand', async () => {
      if (!state.graphId || !state.form) throw new Error('no graph loaded');
      if (!state.form.treatment) throw new Error('choose a treatment first');
      const response = await state.client.identify(
        state.graphId,
        state.form.treatment,
        state.form.outcome,
      );
      applyEstimand(response.estimand);
      await refreshTimeline();
    });
  });

  byId<HTMLSelectElement>('treatment-select').addEventListener('change', (event) => {
    const value = (event.target as HTMLSelectElement).value;
    if (state.form && value) {
      state.form.setTreatment(value);
      byId<HTMLInputElement>('control-value').value = String(state.form.controlValue);
      byId<HTMLInputElement>('treat-value').value = String(state.form.treatValue);
      renderForm();
    }
  });

  for (const [inputId, field] of [
    ['control-value', 'controlValue'],
    ['treat-value', 'treatValue'],
  ] as const) {
    byId<HTMLInputElement>(inputId).addEventListener('change', (event) => {
      if (!state.form) return;
      const raw = Number((event.target as HTMLInputElement).value);
      state.form[field] = state.form.clamp(state.form.treatment, raw);
      (event.target as HTMLInputElement).value = String(state.form[field]);
    });
  }

  byId<HTMLButtonElement>('estimate-button').addEventListener('click', () => {
    if (!state.form) return;
    const issues = state.form.validate();
    showValidation(issues);
    if (issues.length > 0) return; // inline validation, no request
    void guarded('estimating effect', async () => {
      if (!state.graphId) throw new Error('no graph loaded');
      const request = state.form!.buildRequest()!;
      const response = await state.client.estimate(state.graphId, {
        scenario: request,
        seed: state.form!.seed,
        include_baseline: byId<HTMLInputElement>('with-baseline').checked,
        include_oracle: byId<HTMLInputElement>('with-oracle').checked,
      });
      byId('effect-host').innerHTML =
        effectSummaryHtml(response) +
        histogramSvg(response.estimate) +
        cumulativeSvg(response.estimate);
      applyEstimand(response.estimand);
      await refreshTimeline();
    });
  });
}

function applyEstimand(estimand: EstimandPayload): void {
  state.highlights = highlightsFromEstimand(estimand);
  byId('estimand-host').innerHTML = adjustmentSummaryHtml(
    estimand.minimal_adjustment_sets,
    estimand.forbidden_nodes,
    estimand.null_effect,
  );
  renderGraph();
}

export function start(): void {
  bindActions();
  setStatus('ready');
}

if (typeof document !== 'undefined' && document.getElementById('status')) {
  start();
}
