// Hover detail panel: the full configuration plus every metric's raw and
// canonical value, straight from the document.

import type { PlotDocument } from './types.js';

export interface DetailRow {
  label: string;
  value: string;
}

export function detailRows(doc: PlotDocument, configId: number): DetailRow[] {
  const point = doc.points.find((p) => p.config_id === configId);
  if (point === undefined) {
    throw new Error(`unknown config_id ${configId}`);
  }
  const rows: DetailRow[] = [
    { label: 'config', value: `#${point.config_id}` },
    { label: 'family', value: point.family },
  ];
  for (const [key, value] of Object.entries(point.hyperparams)) {
    rows.push({ label: key, value });
  }
  rows.push(
    { label: 'threshold', value: String(point.threshold) },
    { label: 'preprocessor', value: point.preprocessor },
    { label: 'postprocessor', value: point.postprocessor },
    { label: 'exclude_protected', value: String(point.exclude_protected) },
  );
  for (const metric of doc.metrics) {
    const cell = point.metrics[metric.id];
    rows.push({
      label: metric.id,
      value: cell?.defined
        ? `raw ${String(cell.raw)} / score ${String(cell.score)}`
        : 'undefined',
    });
  }
  return rows;
}

export function renderDetail(
  panel: HTMLElement,
  doc: PlotDocument,
  configId: number | null,
): void {
  panel.textContent = '';
  if (configId === null) {
    const hint = document.createElement('p');
    hint.className = 'detail-hint';
    hint.textContent = 'Hover a point for its configuration.';
    panel.appendChild(hint);
    return;
  }
  const list = document.createElement('dl');
  list.className = 'detail-list';
  for (const row of detailRows(doc, configId)) {
    const dt = document.createElement('dt');
    dt.textContent = row.label;
    const dd = document.createElement('dd');
    dd.textContent = row.value;
    list.append(dt, dd);
  }
  panel.appendChild(list);
}
