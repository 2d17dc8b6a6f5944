// Deterministic force-directed layout. Positions are client-only state and
// never leave the browser; a seeded start keeps reloads stable.

import type { GraphPayload } from './types';

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations: number;
  seed: number;
}

const DEFAULTS: LayoutOptions = {
  width: 900,
  height: 600,
  iterations: 300,
  seed: 1,
};

/** Small deterministic PRNG (mulberry32). */
export function seededRandom(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  graph: GraphPayload,
  options: Partial<LayoutOptions> = {},
  pinned: Map<string, Point> = new Map(),
): Map<string, Point> {
  const opts = { ...DEFAULTS, ...options };
  const nodes = graph.nodes;
  const rand = seededRandom(opts.seed);
  const positions = new Map<string, Point>();
  for (const node of nodes) {
    const pin = pinned.get(node);
    positions.set(
      node,
      pin ? { ...pin } : {
        x: opts.width * (0.1 + 0.8 * rand()),
        y: opts.height * (0.1 + 0.8 * rand()),
      },
    );
  }
  const links: [string, string][] = [
    ...graph.directed,
    ...graph.undirected,
  ];
  const area = opts.width * opts.height;
  const k = Math.sqrt(area / Math.max(nodes.length, 1));

  for (let iter = 0; iter < opts.iterations; iter += 1) {
    const temperature = 0.1 * Math.max(opts.width, opts.height) *
      (1 - iter / opts.iterations);
    const force = new Map<string, Point>(
      nodes.map((n) => [n, { x: 0, y: 0 }]),
    );
    // Pairwise repulsion.
    for (let i = 0; i < nodes.length; i += 1) {
      for (let j = i + 1; j < nodes.length; j += 1) {
        const a = positions.get(nodes[i])!;
        const b = positions.get(nodes[j])!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let dist = Math.hypot(dx, dy);
        if (dist < 1e-6) {
          dx = 0.01 * (i - j);
          dy = 0.01;
          dist = Math.hypot(dx, dy);
        }
        const push = (k * k) / dist;
        const fa = force.get(nodes[i])!;
        const fb = force.get(nodes[j])!;
        fa.x += (dx / dist) * push;
        fa.y += (dy / dist) * push;
        fb.x -= (dx / dist) * push;
        fb.y -= (dy / dist) * push;
      }
    }
    // Spring attraction along edges.
    for (const [u, v] of links) {
      const a = positions.get(u)!;
      const b = positions.get(v)!;
      const dx = a.x - b.x;
      const dy = a.y - b.y;
      const dist = Math.max(Math.hypot(dx, dy), 1e-6);
      const pull = (dist * dist) / k;
      const fa = force.get(u)!;
      const fb = force.get(v)!;
      fa.x -= (dx / dist) * pull;
      fa.y -= (dy / dist) * pull;
      fb.x += (dx / dist) * pull;
      fb.y += (dy / dist) * pull;
    }
    // Gentle centering.
    for (const node of nodes) {
      const p = positions.get(node)!;
      const f = force.get(node)!;
      f.x += (opts.width / 2 - p.x) * 0.02;
      f.y += (opts.height / 2 - p.y) * 0.02;
    }
    for (const node of nodes) {
      if (pinned.has(node)) continue;
      const p = positions.get(node)!;
      const f = force.get(node)!;
      const magnitude = Math.max(Math.hypot(f.x, f.y), 1e-6);
      const step = Math.min(magnitude, temperature);
      p.x += (f.x / magnitude) * step;
      p.y += (f.y / magnitude) * step;
      p.x = Math.min(opts.width - 30, Math.max(30, p.x));
      p.y = Math.min(opts.height - 20, Math.max(20, p.y));
    }
  }
  return positions;
}
