/**
 * Nine-panel stationary-state figure: per branch one row with the gas
 * density, the two optical-potential envelopes, and the running-wave
 * fractions N+/N-.  Inputs are three stationary CSVs from the solver CLI.
 */

import { CsvTable, column, readCsv } from "./csv";
import { PanelSpec, renderGrid } from "./svg";

export function fig2Panels(tables: CsvTable[]): PanelSpec[] {
  const panels: PanelSpec[] = [];
  tables.forEach((table, row) => {
    const xi = column(table, "xi");
    const label = `branch seed ${row}`;
    panels.push({
      title: `(${row + 1}a) density`,
      xLabel: "xi",
      yLabel: "nu",
      series: [{ x: xi, y: column(table, "nu"), color: "#1f77b4" }],
    });
    panels.push({
      title: `(${row + 1}b) potential envelopes`,
      xLabel: "xi",
      yLabel: "depth / k_B T",
      series: [
        { x: xi, y: column(table, "env_pump_fiber"), color: "#1f77b4" },
        { x: xi, y: column(table, "env_fiber_fiber"), color: "#8c510a" },
      ],
    });
    panels.push({
      title: `(${row + 1}c) photon fractions, ${label}`,
      xLabel: "xi",
      yLabel: "N+-",
      series: [
        { x: xi, y: column(table, "Nplus"), color: "#1f77b4" },
        { x: xi, y: column(table, "Nminus"), color: "#d62728" },
      ],
      yExtent: { min: -0.05, max: 1.05 },
      guides: [0.5],
    });
  });
  return panels;
}

export function renderFig2(paths: string[], opts: { columns?: number } = {}): string {
  if (paths.length !== 3) {
    throw new Error(`fig2 needs exactly 3 stationary CSVs, got ${paths.length}`);
  }
  const tables = paths.map((p) => readCsv(p, "stationary"));
  return renderGrid(fig2Panels(tables), opts.columns ?? 3);
}
