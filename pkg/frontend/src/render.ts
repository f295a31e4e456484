import { writeFileSync } from "fs";
import * as echarts from "echarts";
import { Table, loadCsv, requireColumns } from "./csv";

export type FigureKind = "trajectories" | "errorbar" | "bound_overlay";

export interface FigureSpec {
  csvPath: string;
  kind: FigureKind;
  xColumn: string;
  yColumn: string;
  groupColumn?: string;
  outputPath: string;
  boundCsvPath?: string; // bound_overlay only
  title?: string;
  logX?: boolean;
}

const WIDTH = 900;
const HEIGHT = 600;

function groupRows(table: Table, spec: FigureSpec): Map<string, [number, number][]> {
  const series = new Map<string, [number, number][]>();
  for (const row of table.rows) {
    const key = spec.groupColumn ? String(row[spec.groupColumn]) : "series";
    if (!series.has(key)) series.set(key, []);
    series.get(key)!.push([Number(row[spec.xColumn]), Number(row[spec.yColumn])]);
  }
  return series;
}

function trajectoriesOption(table: Table, spec: FigureSpec): echarts.EChartsOption {
  const groups = groupRows(table, spec);
  return {
    animation: false,
    title: { text: spec.title ?? `${spec.yColumn} vs ${spec.xColumn}` },
    xAxis: { type: "value", name: spec.xColumn },
    yAxis: { type: "value", name: spec.yColumn },
    series: [...groups.entries()].map(([name, data]) => ({
      name,
      type: "line",
      showSymbol: false,
      lineStyle: { width: 1, opacity: 0.7 },
      data,
    })),
  };
}

function errorPairs(table: Table, spec: FigureSpec): {
  mean: [number, number][];
  bars: [number, number, number][] | null;
} {
  const mean: [number, number][] = table.rows.map((row) => [
    Number(row[spec.xColumn]),
    Number(row[spec.yColumn]),
  ]);
  // a mean_* column with a matching std_* sibling gets error bars
  const stdColumn = spec.yColumn.startsWith("mean_")
    ? spec.yColumn.replace(/^mean_/, "std_")
    : null;
  if (stdColumn && table.columns.includes(stdColumn)) {
    const bars = table.rows.map((row): [number, number, number] => {
      const x = Number(row[spec.xColumn]);
      const y = Number(row[spec.yColumn]);
      const s = Number(row[stdColumn]);
      return [x, y - s, y + s];
    });
    return { mean, bars };
  }
  return { mean, bars: null };
}

function errorbarOption(table: Table, spec: FigureSpec): echarts.EChartsOption {
  const { mean, bars } = errorPairs(table, spec);
  const series: echarts.SeriesOption[] = [
    {
      name: spec.yColumn,
      type: "line",
      symbol: "circle",
      symbolSize: 6,
      data: mean,
    },
  ];
  if (bars) {
    series.push({
      name: "spread",
      type: "custom",
      renderItem: (_params: unknown, api: any) => {
        const x = api.value(0);
        const lo = api.coord([x, api.value(1)]);
        const hi = api.coord([x, api.value(2)]);
        const halfWidth = 5;
        const style = { stroke: "#555", fill: undefined as unknown as string, lineWidth: 1 };
        return {
          type: "group",
          children: [
            { type: "line", shape: { x1: hi[0], y1: hi[1], x2: lo[0], y2: lo[1] }, style },
            { type: "line", shape: { x1: hi[0] - halfWidth, y1: hi[1], x2: hi[0] + halfWidth, y2: hi[1] }, style },
            { type: "line", shape: { x1: lo[0] - halfWidth, y1: lo[1], x2: lo[0] + halfWidth, y2: lo[1] }, style },
          ],
        };
      },
      data: bars,
      z: 5,
    });
  }
  return {
    animation: false,
    title: { text: spec.title ?? `${spec.yColumn} vs ${spec.xColumn}` },
    xAxis: { type: spec.logX ? "log" : "value", name: spec.xColumn },
    yAxis: { type: "value", name: spec.yColumn },
    series,
  };
}

function boundOverlayOption(table: Table, spec: FigureSpec): echarts.EChartsOption {
  if (!spec.boundCsvPath) {
    throw new Error("bound_overlay needs a bound CSV (--bound-csv)");
  }
  const bound = loadCsv(spec.boundCsvPath);
  const base = errorbarOption(table, spec);
  const series = base.series as echarts.SeriesOption[];
  if (bound.columns.length === 2 && bound.rows.length > 1) {
    // two-column bound file: a reference curve over the same x axis
    const [bx, by] = bound.columns;
    series.push({
      name: `bound ${by}`,
      type: "line",
      symbol: "none",
      lineStyle: { type: "dashed", width: 2 },
      data: bound.rows.map((row) => [Number(row[bx]), Number(row[by])]),
    });
  } else {
    // single row: a horizontal reference level
    const level = Number(bound.rows[0][bound.columns[bound.columns.length - 1]]);
    series.push({
      name: "bound",
      type: "line",
      symbol: "none",
      lineStyle: { type: "dashed", width: 2 },
      markLine: { silent: true, symbol: "none", data: [{ yAxis: level }] },
      data: [],
    });
  }
  return base;
}

export interface RenderResult {
  outputPath: string;
  seriesCount: number;
}

/** Render a figure spec to an SVG image file. */
export function render(spec: FigureSpec): RenderResult {
  const table = loadCsv(spec.csvPath);
  requireColumns(table, [spec.xColumn, spec.yColumn], spec.csvPath);
  if (spec.groupColumn) requireColumns(table, [spec.groupColumn], spec.csvPath);

  let option: echarts.EChartsOption;
  switch (spec.kind) {
    case "trajectories":
      option = trajectoriesOption(table, spec);
      break;
    case "errorbar":
      option = errorbarOption(table, spec);
      break;
    case "bound_overlay":
      option = boundOverlayOption(table, spec);
      break;
    default:
      throw new Error(`unknown figure kind: ${spec.kind}`);
  }

  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width: WIDTH, height: HEIGHT });
  try {
    chart.setOption(option);
    const svg = chart.renderToSVGString();
    writeFileSync(spec.outputPath, svg, "utf-8");
  } finally {
    chart.dispose();
  }
  const series = option.series as echarts.SeriesOption[];
  return { outputPath: spec.outputPath, seriesCount: series.length };
}
