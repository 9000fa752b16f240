// View state and its pure transitions. The UI never does metric math: every
// displayed number and frontier membership comes from the plot document.

import type { PlotDocument, PlotPoint } from './types.js';

export interface ViewState {
  selectedMetrics: string[];
  xMetric: string;
  yMetric: string;
  visibleFamilies: string[];
  showAllPoints: boolean;
  hoveredConfigId: number | null;
}

export function initialView(doc: PlotDocument): ViewState {
  if (doc.metrics.length < 2) {
    throw new Error('plot document needs at least two metrics');
  }
  const selected = doc.metrics.slice(0, 2).map((m) => m.id);
  return {
    selectedMetrics: selected,
    xMetric: selected[0],
    yMetric: selected[1],
    visibleFamilies: doc.families.map((f) => f.id),
    showAllPoints: false,
    hoveredConfigId: null,
  };
}

export function assertValid(doc: PlotDocument, view: ViewState): void {
  const known = new Set(doc.metrics.map((m) => m.id));
  for (const metric of view.selectedMetrics) {
    if (!known.has(metric)) throw new Error(`unknown metric ${metric}`);
  }
  if (view.selectedMetrics.length < 2) {
    throw new Error('at least two metrics must stay selected');
  }
  if (view.xMetric === view.yMetric) throw new Error('x and y metrics must differ');
  for (const axis of [view.xMetric, view.yMetric]) {
    if (!view.selectedMetrics.includes(axis)) {
      throw new Error(`axis metric ${axis} is not in the selected set`);
    }
  }
  const families = new Set(doc.families.map((f) => f.id));
  for (const family of view.visibleFamilies) {
    if (!families.has(family)) throw new Error(`unknown family ${family}`);
  }
}

/** Frontier membership for an unordered metric pair, from the document. */
export function frontierFor(doc: PlotDocument, a: string, b: string): number[] {
  const want = [a, b].sort().join('|');
  for (const entry of doc.frontiers) {
    if ([...entry.metrics].sort().join('|') === want) return entry.config_ids;
  }
  return [];
}

/** The points the scatter shows under the current view, by config_id order.
 *
 * Failed points and points with an undefined axis metric are never shown.
 * Frontier-only mode intersects the document's frontier set for (x, y) with
 * the visible families; show-all mode overlays dominated points too.
 */
export function displayedPoints(doc: PlotDocument, view: ViewState): PlotPoint[] {
  const frontier = new Set(frontierFor(doc, view.xMetric, view.yMetric));
  const visible = new Set(view.visibleFamilies);
  return doc.points
    .filter((p) => !p.failed && visible.has(p.family))
    .filter((p) => p.metrics[view.xMetric]?.defined && p.metrics[view.yMetric]?.defined)
    .filter((p) => view.showAllPoints || frontier.has(p.config_id))
    .sort((a, b) => a.config_id - b.config_id);
}

export function isOnFrontier(doc: PlotDocument, view: ViewState, configId: number): boolean {
  return frontierFor(doc, view.xMetric, view.yMetric).includes(configId);
}

export function toggleFamily(view: ViewState, family: string): ViewState {
  const visible = view.visibleFamilies.includes(family)
    ? view.visibleFamilies.filter((f) => f !== family)
    : [...view.visibleFamilies, family];
  return { ...view, visibleFamilies: visible };
}

export function setAxes(view: ViewState, x: string, y: string): ViewState {
  const next = { ...view, xMetric: x, yMetric: y };
  if (x === y) throw new Error('x and y metrics must differ');
  for (const axis of [x, y]) {
    if (!view.selectedMetrics.includes(axis)) {
      throw new Error(`axis metric ${axis} is not in the selected set`);
    }
  }
  return next;
}

export function swapAxes(view: ViewState): ViewState {
  return { ...view, xMetric: view.yMetric, yMetric: view.xMetric };
}

/** Change the checklist; axes fall back to the first selected metrics when
 * their metric is dropped. Fewer than two selections are rejected. */
export function setSelectedMetrics(view: ViewState, metrics: string[]): ViewState {
  if (metrics.length < 2) {
    throw new Error('at least two metrics must stay selected');
  }
  let { xMetric, yMetric } = view;
  if (!metrics.includes(xMetric)) {
    xMetric = metrics.find((m) => m !== yMetric)!;
  }
  if (!metrics.includes(yMetric)) {
    yMetric = metrics.find((m) => m !== xMetric)!;
  }
  return { ...view, selectedMetrics: [...metrics], xMetric, yMetric };
}

export function setShowAll(view: ViewState, showAll: boolean): ViewState {
  return { ...view, showAllPoints: showAll };
}

export function setHovered(view: ViewState, configId: number | null): ViewState {
  return { ...view, hoveredConfigId: configId };
}
