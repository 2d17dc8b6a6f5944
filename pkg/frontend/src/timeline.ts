// Session timeline: graph version history plus past queries, so a designer
// can retrace the iteration loop.

import type { DatasetInfoResponse } from './types';

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;');
}

export interface TimelineItem {
  kind: 'graph' | 'identify' | 'estimate';
  label: string;
  graphId: string;
}

export function timelineItems(info: DatasetInfoResponse): TimelineItem[] {
  const items: TimelineItem[] = [];
  for (const g of info.graphs) {
    const origin = g.parent_id ? `from ${g.parent_id}` : 'discovered';
    items.push({
      kind: 'graph',
      label: `${g.graph_id}: ${g.created_by} (${origin})`,
      graphId: g.graph_id,
    });
  }
  for (const q of info.queries) {
    if (q.kind === 'identify') {
      items.push({
        kind: 'identify',
        label: `identify ${q['treatment']} -> ${q['outcome']} on ${q.graph_id}`,
        graphId: q.graph_id,
      });
    } else {
      const scenario = q['scenario'] as {
        treatment: string;
        control: number;
        treat: number;
      };
      const tau = q['tau'] as number;
      items.push({
        kind: 'estimate',
        label:
          `what-if ${scenario.treatment} ${scenario.control} -> ` +
          `${scenario.treat} on ${q.graph_id}: tau ${tau.toFixed(1)}`,
        graphId: q.graph_id,
      });
    }
  }
  return items;
}

export function timelineHtml(info: DatasetInfoResponse): string {
  const items = timelineItems(info)
    .map(
      (item) =>
        `<li class="${item.kind}" data-graph="${escapeHtml(item.graphId)}">` +
        `${escapeHtml(item.label)}</li>`,
    )
    .join('');
  return `<ol class="timeline">${items}</ol>`;
}
