import { describe, expect, it } from 'vitest';

import { GraphViewState, orientationMap, pairKey, sameState } from '../src/graphState';
import type { GraphPayload } from '../src/types';

const GRAPH: GraphPayload = {
  nodes: ['A', 'B', 'C', 'D'],
  directed: [
    ['A', 'B'],
    ['C', 'B'],
  ],
  undirected: [['C', 'D']],
};

describe('GraphViewState', () => {
  it('starts with no pending edits', () => {
    const state = new GraphViewState(GRAPH);
    expect(state.pendingCount()).toBe(0);
    expect(state.constraintsPayload()).toEqual({
      required: [],
      forbidden: [],
      tiers: [],
    });
  });

  it('cycles an undirected edge through both orientations and removal', () => {
    const state = new GraphViewState(GRAPH);
    expect(state.cycleEdge('C', 'D')).toEqual({
      kind: 'directed',
      from: 'C',
      to: 'D',
    });
    expect(state.cycleEdge('C', 'D')).toEqual({
      kind: 'directed',
      from: 'D',
      to: 'C',
    });
    expect(state.cycleEdge('C', 'D')).toEqual({ kind: 'removed' });
    // Fourth click returns to the discovered (undirected) state.
    expect(state.cycleEdge('C', 'D')).toEqual({ kind: 'undirected' });
    expect(state.pendingCount()).toBe(0);
  });

  it('skips the discovered state inside the cycle of a directed edge', () => {
    const state = new GraphViewState(GRAPH);
    // Discovered A->B; first click must not "edit" to the same A->B.
    expect(state.cycleEdge('A', 'B')).toEqual({
      kind: 'directed',
      from: 'B',
      to: 'A',
    });
    expect(state.cycleEdge('A', 'B')).toEqual({ kind: 'removed' });
    expect(state.cycleEdge('A', 'B')).toEqual({
      kind: 'directed',
      from: 'A',
      to: 'B',
    });
    expect(state.pendingCount()).toBe(0);
  });

  it('maps edits one-to-one onto the constraints payload', () => {
    const state = new GraphViewState(GRAPH);
    state.setEdgeState('C', 'D', { kind: 'directed', from: 'C', to: 'D' });
    state.setEdgeState('A', 'B', { kind: 'removed' });
    const payload = state.constraintsPayload();
    expect(payload.required).toEqual([['C', 'D']]);
    // A removal forbids both orientations of exactly that pair.
    expect(payload.forbidden).toEqual([
      ['A', 'B'],
      ['B', 'A'],
    ]);
    expect(state.pendingCount()).toBe(2);
  });

  it('setting an edge back to its discovered state clears the edit', () => {
    const state = new GraphViewState(GRAPH);
    state.setEdgeState('A', 'B', { kind: 'removed' });
    expect(state.pendingCount()).toBe(1);
    state.setEdgeState('A', 'B', { kind: 'directed', from: 'A', to: 'B' });
    expect(state.pendingCount()).toBe(0);
  });

  it('rejects edits on non-adjacent pairs', () => {
    const state = new GraphViewState(GRAPH);
    expect(() => state.cycleEdge('A', 'D')).toThrow(/no edge/);
  });

  it('clearEdits resets everything', () => {
    const state = new GraphViewState(GRAPH);
    state.cycleEdge('C', 'D');
    state.cycleEdge('A', 'B');
    state.clearEdits();
    expect(state.pendingCount()).toBe(0);
  });
});

describe('orientation helpers', () => {
  it('pairKey is order independent', () => {
    expect(pairKey('X', 'Y')).toBe(pairKey('Y', 'X'));
  });

  it('sameState distinguishes orientations', () => {
    expect(
      sameState(
        { kind: 'directed', from: 'A', to: 'B' },
        { kind: 'directed', from: 'B', to: 'A' },
      ),
    ).toBe(false);
    expect(sameState({ kind: 'removed' }, { kind: 'removed' })).toBe(true);
  });

  it('orientationMap covers every server edge', () => {
    const map = orientationMap(GRAPH);
    expect(map.size).toBe(3);
    expect(map.get(pairKey('A', 'B'))).toEqual({
      kind: 'directed',
      from: 'A',
      to: 'B',
    });
    expect(map.get(pairKey('D', 'C'))).toEqual({ kind: 'undirected' });
  });
});
