/**
 * Branch diagram: order parameter Theta against the pump ratio eps/eps_c,
 * one curve per branch index, discontinuities drawn as gaps, plus the
 * threshold guide line at eps/eps_c = 1.  Normal-phase markers (theta = 0)
 * are suppressed from the curves so each branch starts at its onset.
 */

import { CsvTable, column, readCsv } from "./csv";
import { PanelSpec, extentOf, renderGrid } from "./svg";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

export function fig3Panel(tables: CsvTable[], title: string): PanelSpec {
  const series = tables.map((table, i) => {
    const ratio = column(table, "eps_over_eps_c");
    const theta = column(table, "theta");
    const x: number[] = [];
    const y: number[] = [];
    for (let k = 0; k < ratio.length; k += 1) {
      if (theta[k] > 0) {
        x.push(ratio[k]);
        y.push(theta[k]);
      }
    }
    const spread = extentOf(y);
    return {
      x,
      y,
      color: COLORS[i % COLORS.length],
      // a jump bigger than a tenth of the theta range breaks the polyline
      gapThreshold: Math.max((spread.max - spread.min) / 10, 1e-12),
    };
  });
  const allRatio = tables.flatMap((t) => column(t, "eps_over_eps_c"));
  return {
    title,
    xLabel: "eps / eps_c",
    yLabel: "Theta",
    series,
    verticalGuides: [1.0],
    xExtent: extentOf(allRatio.length ? allRatio : [0, 2], 0.02),
  };
}

export function renderFig3(paths: string[], title = "order-parameter branches"): string {
  if (paths.length === 0) {
    throw new Error("fig3 needs at least one branches CSV");
  }
  const tables = paths.map((p) => readCsv(p, "branches"));
  return renderGrid([fig3Panel(tables, title)], 1);
}
