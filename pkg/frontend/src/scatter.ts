// SVG scatter of canonical scores. Canonical scores live in [0, 1] on both
// axes, so the plot domain is fixed and renders stay comparable across views.

import { displayedPoints, isOnFrontier, type ViewState } from './state.js';
import type { PlotDocument } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

const WIDTH = 640;
const HEIGHT = 480;
const MARGIN = { top: 16, right: 16, bottom: 48, left: 56 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

export interface ScatterHandlers {
  onHover(configId: number | null): void;
  onSelect(configId: number): void;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

function displayName(doc: PlotDocument, metric: string): string {
  return doc.metrics.find((m) => m.id === metric)?.display_name ?? metric;
}

export function xPosition(score: number): number {
  return MARGIN.left + score * PLOT_W;
}

export function yPosition(score: number): number {
  return MARGIN.top + (1 - score) * PLOT_H;
}

export function renderScatter(
  container: HTMLElement,
  doc: PlotDocument,
  view: ViewState,
  handlers: ScatterHandlers,
): void {
  container.textContent = '';
  const svg = svgEl('svg', {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: 'scatter',
    role: 'img',
  });

  const axes = svgEl('g', { class: 'axes' });
  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    const gx = xPosition(tick);
    const gy = yPosition(tick);
    axes.appendChild(
      svgEl('line', {
        x1: `${gx}`, y1: `${MARGIN.top}`, x2: `${gx}`, y2: `${MARGIN.top + PLOT_H}`,
        class: 'grid',
      }),
    );
    axes.appendChild(
      svgEl('line', {
        x1: `${MARGIN.left}`, y1: `${gy}`, x2: `${MARGIN.left + PLOT_W}`, y2: `${gy}`,
        class: 'grid',
      }),
    );
    const xLabel = svgEl('text', {
      x: `${gx}`, y: `${MARGIN.top + PLOT_H + 16}`, class: 'tick', 'text-anchor': 'middle',
    });
    xLabel.textContent = tick.toFixed(2);
    const yLabel = svgEl('text', {
      x: `${MARGIN.left - 8}`, y: `${gy + 4}`, class: 'tick', 'text-anchor': 'end',
    });
    yLabel.textContent = tick.toFixed(2);
    axes.append(xLabel, yLabel);
  }
  const xTitle = svgEl('text', {
    x: `${MARGIN.left + PLOT_W / 2}`, y: `${HEIGHT - 8}`,
    class: 'axis-title', 'text-anchor': 'middle', 'data-axis': 'x',
  });
  xTitle.textContent = displayName(doc, view.xMetric);
  const yTitle = svgEl('text', {
    x: '14', y: `${MARGIN.top + PLOT_H / 2}`,
    class: 'axis-title', 'text-anchor': 'middle', 'data-axis': 'y',
    transform: `rotate(-90 14 ${MARGIN.top + PLOT_H / 2})`,
  });
  yTitle.textContent = displayName(doc, view.yMetric);
  axes.append(xTitle, yTitle);
  svg.appendChild(axes);

  const colors = new Map(doc.families.map((f) => [f.id, f.color]));
  const pointsGroup = svgEl('g', { class: 'points' });
  for (const point of displayedPoints(doc, view)) {
    const x = point.metrics[view.xMetric].score as number;
    const y = point.metrics[view.yMetric].score as number;
    const dimmed = view.showAllPoints && !isOnFrontier(doc, view, point.config_id);
    const circle = svgEl('circle', {
      cx: `${xPosition(x)}`,
      cy: `${yPosition(y)}`,
      r: point.config_id === view.hoveredConfigId ? '7' : '5',
      fill: colors.get(point.family) ?? '#666666',
      class: dimmed ? 'point dimmed' : 'point',
      'data-config-id': `${point.config_id}`,
      'data-family': point.family,
      'data-dimmed': dimmed ? 'true' : 'false',
    });
    circle.addEventListener('mouseenter', () => handlers.onHover(point.config_id));
    circle.addEventListener('mouseleave', () => handlers.onHover(null));
    circle.addEventListener('click', () => handlers.onSelect(point.config_id));
    pointsGroup.appendChild(circle);
  }
  svg.appendChild(pointsGroup);
  container.appendChild(svg);
}
