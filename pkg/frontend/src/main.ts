/** Wiring: file loading, keyboard-first queue navigation, corrections. */

import { BundleError, ReviewEpoch, STAGE_NAMES, StageCode } from "./bundle";
import {
  confidenceTrace,
  hypnogramStrip,
  influenceBars,
  probabilityStack,
  probabilityTable,
  signalWithHeatmap,
} from "./charts";
import { ReviewSession } from "./session";

let session: ReviewSession | null = null;
let threshold = 0.5;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function setBanner(text: string, isError = false): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = text;
  banner.className = isError ? "banner error" : "banner";
  banner.hidden = text === "";
}

function renderOverview(): void {
  if (session === null) return;
  const epochs = session.bundle.epochs;
  el("hypnogram-strip").innerHTML = hypnogramStrip(epochs);
  el("confidence-trace").innerHTML = confidenceTrace(epochs, threshold);
  el("probability-stack").innerHTML = probabilityStack(epochs);
  el("recording-title").textContent =
    `${session.bundle.recording_id} — ${epochs.length} epochs, ` +
    `${session.queue.length} in review queue`;
}

function renderDetail(epoch: ReviewEpoch | null): void {
  const detail = el<HTMLDivElement>("detail");
  if (session === null || epoch === null) {
    detail.hidden = true;
    return;
  }
  detail.hidden = false;
  const truth =
    epoch.true_stage !== undefined ? STAGE_NAMES[epoch.true_stage] : "n/a";
  el("detail-title").textContent =
    `Epoch ${epoch.index} — predicted ${STAGE_NAMES[epoch.predicted_stage]}, ` +
    `confidence ${epoch.confidence.toFixed(3)}, reference ${truth}` +
    (epoch.transitioning ? ", transitioning" : "");
  const signalPanel = el<HTMLDivElement>("signal-panel");
  if (epoch.raw_eeg !== undefined) {
    signalPanel.hidden = false;
    el("raw-signal").innerHTML = signalWithHeatmap(epoch.raw_eeg, epoch.heatmap);
    el("attended-signal").innerHTML =
      epoch.attended_eeg !== undefined
        ? signalWithHeatmap(epoch.attended_eeg, epoch.heatmap)
        : "";
  } else {
    signalPanel.hidden = true;
  }
  const heatNote = el<HTMLParagraphElement>("heatmap-note");
  heatNote.hidden = epoch.heatmap_degenerate !== true;
  const influencePanel = el<HTMLDivElement>("influence-panel");
  if (epoch.influence !== undefined) {
    influencePanel.hidden = false;
    const sum = epoch.influence.weights.reduce((a, b) => a + b, 0);
    el("influence-chart").innerHTML = influenceBars(
      epoch.influence.weights,
      epoch.influence.window_offset,
      epoch.index,
    );
    el("influence-sum").textContent = `weights sum: ${sum.toFixed(2)}`;
  } else {
    influencePanel.hidden = true;
  }
  el("probability-table").innerHTML = probabilityTable(epoch);
  const correction = session.correction(epoch.index);
  el("correction-state").textContent =
    correction === undefined
      ? "no correction recorded"
      : `corrected to ${STAGE_NAMES[correction.correctedStage]}` +
        (correction.note ? ` — ${correction.note}` : "");
}

function refresh(): void {
  if (session === null) return;
  renderOverview();
  renderDetail(session.current());
  el("correction-count").textContent =
    `${session.correctionCount} correction(s)` + (session.dirty ? " (unsaved)" : "");
}

function loadText(text: string): void {
  try {
    session = ReviewSession.fromText(text);
  } catch (err) {
    session = null;
    const reason =
      err instanceof BundleError ? err.message : String(err);
    setBanner(`Could not load bundle: ${reason}`, true);
    return;
  }
  setBanner(
    session.queue.length === 0
      ? "Bundle loaded: no epochs were triaged for review."
      : "",
  );
  refresh();
}

function download(name: string, text: string): void {
  const blob = new Blob([text], { type: "text/csv" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = name;
  a.click();
  URL.revokeObjectURL(url);
}

function correctCurrent(stage: StageCode): void {
  if (session === null) return;
  const epoch = session.current();
  if (epoch === null) return;
  const note = el<HTMLInputElement>("note-input").value;
  session.recordCorrection(epoch.index, stage, note);
  el<HTMLInputElement>("note-input").value = "";
  session.next();
  refresh();
}

function onKey(event: KeyboardEvent): void {
  if (session === null) return;
  if ((event.target as HTMLElement)?.tagName === "INPUT") return;
  if (event.key === "ArrowRight" || event.key === "n") {
    session.next();
    refresh();
  } else if (event.key === "ArrowLeft" || event.key === "p") {
    session.prev();
    refresh();
  } else if (event.key >= "1" && event.key <= "5") {
    correctCurrent((Number(event.key) - 1) as StageCode);
  } else if (event.key === "e") {
    exportCorrections();
  }
}

function exportCorrections(): void {
  if (session === null) return;
  const rid = session.bundle.recording_id;
  download(`${rid}.corrections.csv`, session.exportCorrections());
  refresh();
}

export function init(): void {
  el<HTMLInputElement>("bundle-input").addEventListener("change", async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file !== undefined) loadText(await file.text());
  });
  el<HTMLInputElement>("corrections-input").addEventListener(
    "change",
    async (ev) => {
      const file = (ev.target as HTMLInputElement).files?.[0];
      if (file === undefined || session === null) return;
      try {
        const n = session.importCorrections(await file.text());
        setBanner(`Imported ${n} correction(s).`);
      } catch (err) {
        setBanner(`Could not import corrections: ${String(err)}`, true);
      }
      refresh();
    },
  );
  el<HTMLButtonElement>("export-button").addEventListener("click", () =>
    exportCorrections(),
  );
  el<HTMLInputElement>("threshold-input").addEventListener("input", (ev) => {
    threshold = Number((ev.target as HTMLInputElement).value);
    renderOverview();
  });
  document.addEventListener("keydown", onKey);
  window.addEventListener("beforeunload", (ev) => {
    if (session?.dirty) ev.preventDefault();
  });
}

if (typeof document !== "undefined" && document.getElementById("banner")) {
  init();
}
