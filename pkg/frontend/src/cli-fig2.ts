/** Usage: node dist/cli-fig2.js --in a.csv,b.csv,c.csv --out fig2.svg */

import * as fs from "fs";
import { renderFig2 } from "./fig2";
import { parseArgs } from "./args";

function main(): number {
  let parsed;
  try {
    parsed = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  try {
    const svg = renderFig2(parsed.inputs);
    fs.writeFileSync(parsed.out, svg, "utf-8");
    console.log(parsed.out);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

process.exitCode = main();
