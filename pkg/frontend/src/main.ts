/** DOM wiring for the survey and the live dashboard. */

import { ApiClient, EMOTIONS, Emotion, GroupDetail } from "./api.js";
import { DashboardModel, DashboardView } from "./dashboard.js";
import { SessionController, keyToAction } from "./session.js";

const api = new ApiClient();
const POLL_MS = 2000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

interface PendingAnswer {
  similar: boolean | null;
  emotion: Emotion | null;
}

let session: SessionController | null = null;
let pending: PendingAnswer = { similar: null, emotion: null };
let captionsVisible = false;

function setHidden(id: string, hidden: boolean): void {
  el(id).classList.toggle("hidden", hidden);
}

async function startSession(): Promise<void> {
  const participantId = (el<HTMLInputElement>("participant-input").value || "").trim();
  if (!/^[A-Za-z0-9_-]{1,64}$/.test(participantId)) {
    el("join-error").textContent =
      "Participant id: 1-64 letters, digits, dashes or underscores.";
    return;
  }
  const groups = await api.groups();
  session = new SessionController(
    api, window.localStorage, participantId,
    groups.map((g) => g.group_id),
  );
  setHidden("join-panel", true);
  setHidden("survey-panel", false);
  await renderCurrentGroup();
}

async function renderCurrentGroup(): Promise<void> {
  if (!session) return;
  pending = { similar: null, emotion: null };
  const groupId = session.currentGroup();
  el("progress").textContent =
    `${session.answeredCount()} / ${session.totalCount()} groups answered`;
  if (groupId === null) {
    setHidden("question-block", true);
    el("survey-status").textContent = "All groups answered. Thank you!";
    return;
  }
  setHidden("question-block", false);
  el("survey-status").textContent = "";
  const detail: GroupDetail = await api.groupDetail(groupId);
  el("group-title").textContent = `Group ${detail.group_id}`;
  const grid = el("meme-grid");
  grid.innerHTML = "";
  for (const member of detail.members) {
    const cell = document.createElement("figure");
    cell.className = "meme-cell";
    const img = document.createElement("img");
    img.src = member.image_url;
    img.alt = member.meme_id;
    cell.appendChild(img);
    const caption = document.createElement("figcaption");
    caption.textContent = member.text;
    caption.className = captionsVisible ? "" : "hidden";
    cell.appendChild(caption);
    grid.appendChild(cell);
  }
  renderChoices();
}

function renderChoices(): void {
  for (const [id, value] of [["btn-yes", true], ["btn-no", false]] as const) {
    el(id).classList.toggle("selected", pending.similar === value);
  }
  EMOTIONS.forEach((emotion, index) => {
    el(`emotion-${index + 1}`).classList.toggle("selected", pending.emotion === emotion);
  });
  const ready = pending.similar !== null;
  (el<HTMLButtonElement>("btn-submit")).disabled = !ready;
}

async function submitPending(): Promise<void> {
  if (!session || pending.similar === null) return;
  const result = await session.submit(pending.similar, pending.emotion ?? undefined);
  if (result.accepted) {
    await renderCurrentGroup();
  }
}

function bindSurveyControls(): void {
  el("btn-yes").onclick = () => { pending.similar = true; renderChoices(); };
  el("btn-no").onclick = () => { pending.similar = false; renderChoices(); };
  EMOTIONS.forEach((emotion, index) => {
    el(`emotion-${index + 1}`).onclick = () => {
      pending.emotion = pending.emotion === emotion ? null : emotion;
      renderChoices();
    };
  });
  el("btn-submit").onclick = () => { void submitPending(); };
  el("btn-captions").onclick = () => {
    captionsVisible = !captionsVisible;
    document.querySelectorAll("#meme-grid figcaption").forEach((node) =>
      node.classList.toggle("hidden", !captionsVisible));
  };

  document.addEventListener("keydown", (event) => {
    if (!session || el("survey-panel").classList.contains("hidden")) return;
    if ((event.target as HTMLElement)?.tagName === "INPUT") return;
    const action = keyToAction(event.key);
    switch (action.kind) {
      case "similar":
        pending.similar = action.value;
        renderChoices();
        break;
      case "emotion":
        pending.emotion = action.value;
        renderChoices();
        break;
      case "submit":
        void submitPending();
        break;
      case "toggle-captions":
        el("btn-captions").click();
        break;
      case "none":
        break;
    }
  });
}

function renderDashboard(view: DashboardView | null): void {
  const banner = el("stale-banner");
  const table = el<HTMLTableElement>("dashboard-table");
  const summary = el("dashboard-summary");
  if (view === null) {
    summary.textContent = "no responses yet";
    return;
  }
  banner.classList.toggle("hidden", !view.stale);
  if (view.empty) {
    summary.textContent = "no responses yet";
    table.tBodies[0].innerHTML = "";
    return;
  }
  summary.textContent =
    `average agreement ${view.average}% · ${view.nParticipants} participants · ` +
    `${view.nResponses} responses`;
  const body = table.tBodies[0];
  body.innerHTML = "";
  for (const row of view.rows) {
    const tr = body.insertRow();
    tr.insertCell().textContent = String(row.groupId);
    tr.insertCell().textContent = row.rate;
  }
}

function startDashboard(): void {
  const model = new DashboardModel(api);
  const tick = async () => renderDashboard(await model.poll());
  void tick();
  window.setInterval(() => { void tick(); }, POLL_MS);
}

function init(): void {
  el("btn-join").onclick = () => { void startSession(); };
  el<HTMLInputElement>("participant-input").addEventListener("keydown", (event) => {
    if (event.key === "Enter") void startSession();
  });
  el("btn-show-dashboard").onclick = () => {
    setHidden("dashboard-panel", false);
    startDashboard();
  };
  bindSurveyControls();
}

document.addEventListener("DOMContentLoaded", init);
