// Export the current view as a JSON descriptor and re-import it later.
// Importing a descriptor reproduces the identical view.

import { displayedPoints, assertValid, type ViewState } from './state.js';
import { SUPPORTED_FORMAT_VERSION, type PlotDocument } from './types.js';

export interface ViewDescriptor {
  format_version: number;
  view: {
    selected_metrics: string[];
    x_metric: string;
    y_metric: string;
    visible_families: string[];
    show_all_points: boolean;
    hovered_config_id: number | null;
  };
  displayed_config_ids: number[];
}

export function exportView(doc: PlotDocument, view: ViewState): ViewDescriptor {
  return {
    format_version: doc.format_version,
    view: {
      selected_metrics: [...view.selectedMetrics],
      x_metric: view.xMetric,
      y_metric: view.yMetric,
      visible_families: [...view.visibleFamilies],
      show_all_points: view.showAllPoints,
      hovered_config_id: view.hoveredConfigId,
    },
    displayed_config_ids: displayedPoints(doc, view).map((p) => p.config_id),
  };
}

export function importView(doc: PlotDocument, descriptor: ViewDescriptor): ViewState {
  if (descriptor.format_version !== SUPPORTED_FORMAT_VERSION) {
    throw new Error(
      `view descriptor format_version ${descriptor.format_version} is not supported`,
    );
  }
  const v = descriptor.view;
  const view: ViewState = {
    selectedMetrics: [...v.selected_metrics],
    xMetric: v.x_metric,
    yMetric: v.y_metric,
    visibleFamilies: [...v.visible_families],
    showAllPoints: v.show_all_points,
    hoveredConfigId: v.hovered_config_id ?? null,
  };
  assertValid(doc, view);
  return view;
}

export function serializeDescriptor(descriptor: ViewDescriptor): string {
  return JSON.stringify(descriptor, null, 2) + '\n';
}

export function parseDescriptor(text: string): ViewDescriptor {
  const parsed = JSON.parse(text) as ViewDescriptor;
  if (typeof parsed !== 'object' || parsed === null || typeof parsed.view !== 'object') {
    throw new Error('not a view descriptor');
  }
  return parsed;
}

/** Client-side file download of the current view descriptor. */
export function downloadDescriptor(descriptor: ViewDescriptor, filename = 'view.json'): void {
  const blob = new Blob([serializeDescriptor(descriptor)], { type: 'application/json' });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement('a');
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}
