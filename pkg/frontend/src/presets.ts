import { FigureSpec } from "./render";

export interface PresetSpec {
  kind: FigureSpec["kind"];
  xColumn: string;
  yColumn: string;
  groupColumn?: string;
  defaultCsv: string;
  boundCsv?: string;
  title: string;
  logX?: boolean;
}

/**
 * Figure presets matching the simulator's CSV emitters: fig1/fig2 read the
 * per-node trajectory files from `arraysync run --preset fig1`, fig3..fig8
 * read the sweep files from `arraysync sweep --preset figN`.
 */
export const PRESETS: Record<string, PresetSpec> = {
  fig1: {
    kind: "trajectories",
    xColumn: "iter",
    yColumn: "freq_dev_hz",
    groupColumn: "node",
    defaultCsv: "fig1_n100.csv",
    title: "Per-node frequency deviation vs iteration",
  },
  fig2: {
    kind: "trajectories",
    xColumn: "iter",
    yColumn: "phase_dev_rad",
    groupColumn: "node",
    defaultCsv: "fig2_n100.csv",
    title: "Per-node phase deviation vs iteration",
  },
  fig3: {
    kind: "errorbar",
    xColumn: "param_value",
    yColumn: "mean_sigma_phi_deg",
    defaultCsv: "fig3.csv",
    title: "Consensus: residual phase dispersion vs array size",
  },
  fig4: {
    kind: "errorbar",
    xColumn: "param_value",
    yColumn: "mean_iters",
    defaultCsv: "fig4.csv",
    title: "Consensus: convergence iterations vs connectivity",
  },
  fig5: {
    kind: "errorbar",
    xColumn: "param_value",
    yColumn: "mean_sigma_phi_deg",
    defaultCsv: "fig5.csv",
    title: "Kalman consensus: residual phase dispersion vs array size",
  },
  fig6: {
    kind: "errorbar",
    xColumn: "param_value",
    yColumn: "mean_iters",
    defaultCsv: "fig6.csv",
    title: "Kalman consensus: convergence iterations vs connectivity",
  },
  fig7: {
    kind: "bound_overlay",
    xColumn: "param_value",
    yColumn: "mean_sigma_phi_deg",
    defaultCsv: "fig7.csv",
    boundCsv: "fig7_bound.csv",
    title: "Residual phase dispersion vs update interval (with closed-form bound)",
    logX: true,
  },
  fig8: {
    kind: "errorbar",
    xColumn: "param_value",
    yColumn: "mean_sigma_phi_deg",
    defaultCsv: "fig8.csv",
    title: "Residual phase dispersion vs SNR (TDMA access)",
  },
};
