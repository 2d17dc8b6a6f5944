import { describe, expect, it } from 'vitest';

import { forceLayout, seededRandom } from '../src/layout';
import type { GraphPayload } from '../src/types';

const GRAPH: GraphPayload = {
  nodes: ['A', 'B', 'C', 'D', 'E'],
  directed: [
    ['A', 'B'],
    ['B', 'C'],
    ['C', 'D'],
  ],
  undirected: [['D', 'E']],
};

describe('forceLayout', () => {
  it('is deterministic for a fixed seed', () => {
    const a = forceLayout(GRAPH, { seed: 5 });
    const b = forceLayout(GRAPH, { seed: 5 });
    for (const node of GRAPH.nodes) {
      expect(a.get(node)).toEqual(b.get(node));
    }
  });

  it('keeps every node inside the canvas', () => {
    const positions = forceLayout(GRAPH, { width: 400, height: 300, seed: 2 });
    for (const node of GRAPH.nodes) {
      const p = positions.get(node)!;
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(400);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(300);
    }
  });

  it('separates the nodes', () => {
    const positions = forceLayout(GRAPH, { seed: 3 });
    const points = GRAPH.nodes.map((n) => positions.get(n)!);
    for (let i = 0; i < points.length; i += 1) {
      for (let j = i + 1; j < points.length; j += 1) {
        const dist = Math.hypot(points[i].x - points[j].x, points[i].y - points[j].y);
        expect(dist).toBeGreaterThan(10);
      }
    }
  });

  it('respects pinned positions', () => {
    const pinned = new Map([['A', { x: 123, y: 77 }]]);
    const positions = forceLayout(GRAPH, { seed: 4 }, pinned);
    expect(positions.get('A')).toEqual({ x: 123, y: 77 });
  });
});

describe('seededRandom', () => {
  it('reproduces its stream', () => {
    const a = seededRandom(42);
    const b = seededRandom(42);
    for (let i = 0; i < 10; i += 1) expect(a()).toBe(b());
  });

  it('stays in [0, 1)', () => {
    const r = seededRandom(7);
    for (let i = 0; i < 100; i += 1) {
      const v = r();
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(1);
    }
  });
});
