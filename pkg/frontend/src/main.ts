// DOM wiring: one page, three phases (testing -> result -> preview).

import { HttpApiClient, PaletteDto } from "./api.js";
import { describeKind, severityPercent, TestFlow, UiSessionState } from "./flow.js";
import { buildPreview, simulatedSwatches } from "./theme.js";

const api = new HttpApiClient("");
const root = document.getElementById("app")!;

let defaultPalette: PaletteDto | null = null;
let simSwatches: Record<string, string> = {};

const flow = new TestFlow(api, render);

function el(tag: string, cls: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function render(state: UiSessionState): void {
  root.replaceChildren();
  if (state.error !== null) {
    const banner = el("div", "error-banner");
    banner.append(el("span", "", `Connection problem: ${state.error}`));
    const retry = el("button", "retry", "Retry") as HTMLButtonElement;
    retry.onclick = () => void flow.retry();
    banner.append(retry);
    root.append(banner);
  }
  if (state.phase === "testing") {
    renderTesting(state);
  } else if (state.phase === "result") {
    renderResult(state);
  } else {
    void renderPreview(state);
  }
}

function renderTesting(state: UiSessionState): void {
  const progress = el(
    "p",
    "progress",
    state.plateTotal > 0 ? `Plate ${state.plateIndex + 1} of ${state.plateTotal}` : "Loading…",
  );
  root.append(progress);

  const plate = el("div", "plate");
  plate.innerHTML = state.plateSvg; // server SVG rendered verbatim
  root.append(plate);

  const entry = el("p", "entry", state.entry === "" ? "—" : state.entry);
  entry.setAttribute("data-testid", "entry");
  root.append(entry);

  const pad = el("div", "keypad");
  for (const digit of "1234567890") {
    const button = el("button", "key", digit) as HTMLButtonElement;
    button.disabled = state.busy;
    button.onclick = () => flow.pressDigit(digit);
    pad.append(button);
  }
  const clear = el("button", "key key-wide", "Clear") as HTMLButtonElement;
  clear.disabled = state.busy;
  clear.onclick = () => flow.clearEntry();
  pad.append(clear);
  root.append(pad);

  const actions = el("div", "actions");
  const nothing = el("button", "secondary", "I see nothing") as HTMLButtonElement;
  nothing.disabled = state.busy;
  nothing.onclick = () => void flow.submitNothing();
  const submit = el("button", "primary", "Submit") as HTMLButtonElement;
  submit.disabled = state.busy || state.entry.length === 0;
  submit.onclick = () => void flow.submitEntry();
  actions.append(nothing, submit);
  root.append(actions);
}

function renderResult(state: UiSessionState): void {
  const c = state.classification;
  if (c === null) return;
  const panel = el("div", "result-panel");
  panel.append(el("h2", "", describeKind(c.kind)));
  if (c.kind === "unclassified") {
    panel.append(el("p", "", "The demonstration plate was misread, so no diagnosis was made."));
    const again = el("button", "primary", "Retake test") as HTMLButtonElement;
    again.onclick = () => {
      sessionStorage.removeItem("chromadapt-session");
      void flow.start();
    };
    panel.append(again);
  } else if (c.kind === "normal") {
    panel.append(el("p", "", "No changes needed — the standard color scheme works for you."));
  } else {
    panel.append(el("p", "", `Estimated severity: ${severityPercent(c.severity)}`));
    panel.append(el("p", "", `Confidence: ${severityPercent(c.confidence)}`));
  }
  if (state.adaptation !== null && c.kind !== "unclassified") {
    const preview = el("button", "primary", "Preview your color scheme") as HTMLButtonElement;
    preview.onclick = () => flow.showPreview();
    panel.append(preview);
  }
  root.append(panel);
}

async function renderPreview(state: UiSessionState): Promise<void> {
  const adaptation = state.adaptation;
  const c = state.classification;
  if (adaptation === null || c === null) return;
  if (defaultPalette === null) {
    defaultPalette = await api.fetchDefaultPalette();
  }
  if (Object.keys(simSwatches).length === 0 && c.kind !== "unclassified") {
    simSwatches = await simulatedSwatches(api, adaptation.adapted, c.kind, c.severity);
  }
  const model = buildPreview(defaultPalette, adaptation.adapted);

  const panel = el("div", "preview-panel");
  panel.append(el("h2", "", "Original vs adapted"));
  for (const warning of model.warnings) {
    panel.append(el("p", "warning", warning));
  }

  const sides = el("div", "sides");
  for (const which of ["original", "adapted"] as const) {
    const side = el("div", "side");
    side.append(el("h3", "", which));
    for (const item of model.elements) {
      const color = which === "original" ? item.original : item.adapted;
      const row = el("div", `mock mock-${item.element.kind}`, item.element.label);
      if (item.element.kind === "text") {
        row.style.color = color.hex;
      } else {
        row.style.background = color.hex;
      }
      row.title = `${item.element.role}: ${color.hex}`;
      side.append(row);
    }
    sides.append(side);
  }
  panel.append(sides);

  if (Object.keys(simSwatches).length > 0) {
    panel.append(el("h3", "", "How the adapted palette looks to you (server check)"));
    const swatches = el("div", "swatches");
    for (const [role, hex] of Object.entries(simSwatches)) {
      const chip = el("span", "chip", role);
      chip.style.background = hex;
      swatches.append(chip);
    }
    panel.append(swatches);
  }

  const back = el("button", "secondary", "Back to result") as HTMLButtonElement;
  back.onclick = () => flow.backToResult();
  panel.append(back);
  root.append(panel);
}

async function boot(): Promise<void> {
  const saved = sessionStorage.getItem("chromadapt-session");
  await flow.start(saved ?? undefined);
  if (flow.state.sessionId !== null) {
    sessionStorage.setItem("chromadapt-session", flow.state.sessionId);
  }
}

void boot();
