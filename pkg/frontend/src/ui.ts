// DOM rendering: a pure view over the store. Every number on screen is the
// server's decimal string, untouched; parsing happens only to scale the
// sparkline geometry.

import type { RoundStore } from "./state";

export interface Elements {
  grid: HTMLElement;
  status: HTMLElement;
  gainMeter: HTMLElement;
  suggestionBox: HTMLElement;
  resultBox: HTMLElement;
  errorBanner: HTMLElement;
  submitButton: HTMLButtonElement;
  advanceButton: HTMLButtonElement;
  followToggle: HTMLInputElement;
  sparkline: HTMLElement;
}

export function findElements(root: Document | HTMLElement): Elements {
  const get = (id: string) => {
    const el = root.querySelector(`#${id}`);
    if (!el) throw new Error(`missing element #${id}`);
    return el as HTMLElement;
  };
  return {
    grid: get("grid"),
    status: get("status"),
    gainMeter: get("gain-meter"),
    suggestionBox: get("suggestion"),
    resultBox: get("result"),
    errorBanner: get("error-banner"),
    submitButton: get("submit") as HTMLButtonElement,
    advanceButton: get("advance") as HTMLButtonElement,
    followToggle: get("follow") as HTMLInputElement,
    sparkline: get("sparkline"),
  };
}

export function render(store: RoundStore, el: Elements): void {
  const view = store.view;
  el.errorBanner.textContent = store.error ?? "";
  el.errorBanner.hidden = store.error === null;
  if (!view) {
    el.status.textContent = "connecting...";
    return;
  }

  renderGrid(store, el.grid);
  el.status.textContent = view.phase === "round_closed"
    ? `session complete after ${view.t} rounds`
    : `round ${view.t + 1} of ${view.horizon} (${view.phase.replace("_", " ")})`;

  el.gainMeter.innerHTML = "";
  for (const [label, value] of [["yours", view.ubar], ["baseline", view.xbar],
                                ["gain", view.gain]] as const) {
    const span = document.createElement("span");
    span.className = `metric metric-${label}`;
    span.textContent = `${label}: ${value}`;
    el.gainMeter.appendChild(span);
  }

  el.suggestionBox.textContent = store.suggestion
    ? `suggested: location ${store.suggestion.suggestion} ` +
      `(round payoff ${store.suggestion.u}, baseline ${store.suggestion.x})`
    : "";

  renderResult(store, el.resultBox);
  el.submitButton.disabled = !store.canSubmit;
  el.advanceButton.disabled = !store.canAdvance;
  el.followToggle.checked = store.followSuggestion;
  el.followToggle.disabled = store.phase !== "suggestion_ready";
  renderSparkline(store, el.sparkline);
}

export function renderGrid(store: RoundStore, grid: HTMLElement): void {
  grid.innerHTML = "";
  const view = store.view;
  if (!view) return;
  const suggestion = store.suggestion;
  for (const cell of store.gridCells()) {
    const div = document.createElement("div");
    div.className = "cell";
    div.dataset.cell = String(cell);
    const reward = view.visible[String(cell)];
    div.textContent = reward !== undefined ? reward : "?";
    if (view.allowed_actions.includes(cell)) div.classList.add("allowed");
    if (store.selected === cell) div.classList.add("selected");
    if (suggestion && suggestion.suggestion === cell) {
      div.classList.add("suggested");
    }
    if (!store.canSelect(cell)) div.classList.add("locked");
    grid.appendChild(div);
  }
}

function renderResult(store: RoundStore, box: HTMLElement): void {
  box.innerHTML = "";
  const result = store.lastResult;
  if (!result) return;
  const title = document.createElement("div");
  title.className = "result-title";
  title.textContent = `round ${result.t} closed ` +
    (result.followed ? "(followed suggestion)" : "(kept baseline)");
  box.appendChild(title);
  const rows: [string, string[]][] = [
    ["rewards", result.omega],
    ["baselines", result.b.map(String)],
    ["choices", result.alpha.map(String)],
    ["payoffs", result.u],
    ["baseline payoffs", result.x],
  ];
  for (const [label, values] of rows) {
    const row = document.createElement("div");
    row.className = "result-row";
    row.textContent = `${label}: ${values.join(", ")}`;
    box.appendChild(row);
  }
}

function renderSparkline(store: RoundStore, host: HTMLElement): void {
  host.innerHTML = "";
  if (store.history.length < 2) return;
  const width = 220;
  const height = 48;
  const series: ["ubar" | "xbar", string][] = [["ubar", "spark-u"],
                                               ["xbar", "spark-x"]];
  const numbers = store.history.flatMap((p) => [Number(p.ubar), Number(p.xbar)]);
  const max = Math.max(...numbers, 1e-12);
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "sparkline");
  for (const [key, cls] of series) {
    const points = store.history.map((p, i) => {
      const x = (i / (store.history.length - 1)) * width;
      const y = height - (Number(p[key]) / max) * (height - 4) - 2;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    });
    const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute("points", points.join(" "));
    line.setAttribute("class", cls);
    line.setAttribute("fill", "none");
    svg.appendChild(line);
  }
  host.appendChild(svg);
}
