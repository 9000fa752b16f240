import { validateDocument, type PlotDocument } from './types.js';

export async function fetchPlotDocument(url = '/api/plot'): Promise<PlotDocument> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`GET ${url} failed with status ${response.status}`);
  }
  return validateDocument(await response.json());
}
