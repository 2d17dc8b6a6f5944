// SVG markup for the graph canvas. Pure string builders so rendering is
// unit-testable; the app layer mounts the markup and binds events by id.

import type { EstimandPayload } from './types';
import type { GraphViewState } from './graphState';
import type { Point } from './layout';

export interface GraphHighlights {
  /** Nodes the identify step marked "do not adjust" (descendants). */
  forbidden: Set<string>;
  /** Node pairs lying on open backdoor paths. */
  openBackdoorEdges: Set<string>;
  treatment?: string;
  outcome?: string;
}

export function emptyHighlights(): GraphHighlights {
  return { forbidden: new Set(), openBackdoorEdges: new Set() };
}

/** Derive highlights from an identify response. */
export function highlightsFromEstimand(e: EstimandPayload): GraphHighlights {
  const forbidden = new Set(e.forbidden_nodes);
  const openBackdoorEdges = new Set<string>();
  for (const path of e.paths) {
    if (!path.backdoor || !path.open) continue;
    for (let i = 0; i + 1 < path.nodes.length; i += 1) {
      const [a, b] = [path.nodes[i], path.nodes[i + 1]].sort();
      openBackdoorEdges.add(`${a}|${b}`);
    }
  }
  return {
    forbidden,
    openBackdoorEdges,
    treatment: e.treatment,
    outcome: e.outcome,
  };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function edgeElementId(a: string, b: string): string {
  const [x, y] = a < b ? [a, b] : [b, a];
  return `edge:${x}|${y}`;
}

export function nodeElementId(name: string): string {
  return `node:${name}`;
}

export function renderGraphSvg(
  state: GraphViewState,
  positions: Map<string, Point>,
  highlights: GraphHighlights,
  width = 900,
  height = 600,
): string {
  const parts: string[] = [
    `<svg id="graph-canvas" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
      'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" fill="currentColor"/></marker></defs>',
  ];
  for (const view of state.edgeViews()) {
    const displayed = view.edited ?? view.discovered;
    if (displayed.kind === 'removed') {
      // Removed edges stay clickable as a faint dashed trace.
      parts.push(edgeLine(view.a, view.b, positions, 'edge removed', false));
      continue;
    }
    const pairId = `${view.a}|${view.b}`;
    const classes = ['edge'];
    if (displayed.kind === 'undirected') classes.push('undirected');
    if (view.edited) classes.push('edited');
    if (highlights.openBackdoorEdges.has(pairId)) classes.push('backdoor-open');
    if (displayed.kind === 'directed') {
      parts.push(
        edgeLine(displayed.from, displayed.to, positions, classes.join(' '), true),
      );
    } else {
      parts.push(edgeLine(view.a, view.b, positions, classes.join(' '), false));
    }
  }
  for (const node of state.nodes) {
    const p = positions.get(node);
    if (!p) continue;
    const classes = ['node'];
    if (highlights.forbidden.has(node)) classes.push('forbidden');
    if (node === highlights.treatment) classes.push('treatment');
    if (node === highlights.outcome) classes.push('outcome');
    const label = escapeXml(node);
    parts.push(
      `<g id="${escapeXml(nodeElementId(node))}" class="${classes.join(' ')}" ` +
        `transform="translate(${p.x.toFixed(1)},${p.y.toFixed(1)})">` +
        `<circle r="7"/>` +
        `<text dy="-11" text-anchor="middle">${label}</text>` +
        (highlights.forbidden.has(node)
          ? `<title>do not adjust: descendant of the treatment</title>`
          : '') +
        `</g>`,
    );
  }
  parts.push('</svg>');
  return parts.join('\n');
}

function edgeLine(
  from: string,
  to: string,
  positions: Map<string, Point>,
  className: string,
  arrow: boolean,
): string {
  const a = positions.get(from);
  const b = positions.get(to);
  if (!a || !b) return '';
  // Pull the tip back so arrowheads sit outside the node circle.
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const dist = Math.max(Math.hypot(dx, dy), 1e-6);
  const trim = 9;
  const tip = { x: b.x - (dx / dist) * trim, y: b.y - (dy / dist) * trim };
  const marker = arrow ? ' marker-end="url(#arrow)"' : '';
  return (
    `<line id="${escapeXml(edgeElementId(from, to))}" class="${className}" ` +
    `x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
    `x2="${tip.x.toFixed(1)}" y2="${tip.y.toFixed(1)}"${marker}/>`
  );
}
