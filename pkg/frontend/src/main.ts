// Browser wiring: login gate, task inbox, collaborative canvas, analytics.

import { ApiClient, ApiError } from "./api.js";
import { LoginFlow } from "./session.js";
import { TaskInbox, formFor } from "./inbox.js";
import { CollaborativeCanvas, forceLayout, kindColor } from "./canvas.js";
import { RecommendationPanel, routeNodeSet, teacherBadges } from "./analytics.js";
import type { SubgraphResponse } from "./types.js";

const client = new ApiClient("");
const flow = new LoginFlow(client);
const inbox = new TaskInbox(client);
const canvas = new CollaborativeCanvas(client);
const recommendations = new RecommendationPanel(client);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function show(id: string, visible: boolean): void {
  el(id).style.display = visible ? "" : "none";
}

// -- login ----------------------------------------------------------------

function renderLogin(): void {
  show("login-panel", flow.state !== "ready");
  show("app-panel", flow.state === "ready");
  el("login-error").textContent = flow.error ?? "";
  const challenged = flow.state === "challenged";
  show("challenge-box", challenged);
  if (challenged) {
    el("challenge-prompt").textContent = flow.prompt ?? "";
    show("challenge-yesno", flow.answerMode === "yesno");
    show("challenge-freetext", flow.answerMode === "freetext");
  }
}

async function onLogin(): Promise<void> {
  const userId = (el<HTMLInputElement>("login-user")).value.trim();
  await flow.start(userId);
  renderLogin();
  if (flow.state === "ready") await enterApp();
}

async function onAnswer(answer: string): Promise<void> {
  await flow.submit(answer);
  renderLogin();
  if (flow.state === "ready") await enterApp();
}

// -- inbox -----------------------------------------------------------------

function renderInbox(): void {
  const list = el("task-list");
  list.innerHTML = "";
  el("task-conflict").textContent = inbox.conflict ?? "";
  for (const task of inbox.tasks) {
    const li = document.createElement("li");
    li.textContent = `${task.id} ${task.kind} -> ${task.target} [${task.status}] `;
    if (task.status === "assigned") {
      const kind = formFor(task.kind);
      if (kind === "vote") {
        for (const vote of ["valid", "invalid"] as const) {
          const b = document.createElement("button");
          b.textContent = vote;
          b.onclick = () => void completeAndRender(task.id, { vote });
          li.appendChild(b);
        }
      } else if (kind === "attributes") {
        const input = document.createElement("input");
        input.placeholder = "key=value";
        const b = document.createElement("button");
        b.textContent = "submit attrs";
        b.onclick = () => {
          const [k, v] = input.value.split("=", 2);
          if (k && v) void completeAndRender(task.id, { attrs: { [k]: v } });
        };
        li.append(input, b);
      } else {
        const pred = document.createElement("input");
        pred.placeholder = "predicate";
        const objectLabel = document.createElement("input");
        objectLabel.placeholder = "object literal";
        const b = document.createElement("button");
        b.textContent = "propose triple";
        b.onclick = () => void completeAndRender(task.id, {
          triple: {
            subject: task.target,
            predicate: pred.value,
            object: { literal: objectLabel.value },
          },
        });
        li.append(pred, objectLabel, b);
      }
    }
    list.appendChild(li);
  }
}

async function completeAndRender(taskId: string, payload: Parameters<TaskInbox["complete"]>[1]): Promise<void> {
  await inbox.complete(taskId, payload);
  renderInbox();
}

// -- canvas -----------------------------------------------------------------

function renderCanvas(): void {
  const svg = el<HTMLElement>("graph-svg");
  const ids = [...canvas.nodes.keys()];
  const edges: Array<[string, string]> = [];
  for (const t of canvas.edges.values()) {
    if ("entity" in t.object) edges.push([t.subject, t.object.entity]);
  }
  const pos = forceLayout(ids, edges, 640, 420, 60);
  const parts: string[] = [];
  for (const t of canvas.edges.values()) {
    if (!("entity" in t.object)) continue;
    const a = pos.get(t.subject);
    const b = pos.get(t.object.entity);
    if (!a || !b) continue;
    parts.push(`<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" stroke="#999"/>`);
    parts.push(`<text x="${(a.x + b.x) / 2}" y="${(a.y + b.y) / 2}" font-size="9">${t.predicate}</text>`);
  }
  for (const [id, e] of canvas.nodes) {
    const p = pos.get(id);
    if (!p) continue;
    parts.push(`<circle cx="${p.x}" cy="${p.y}" r="14" fill="${kindColor(e.kind)}"/>`);
    parts.push(`<text x="${p.x + 16}" y="${p.y + 4}" font-size="10">${e.label}</text>`);
  }
  svg.innerHTML = parts.join("");
  el("canvas-error").textContent = canvas.lastError ?? "";
  el("canvas-clock").textContent = `logical clock ${canvas.logicalClock}`;
}

// -- analytics ------------------------------------------------------------------

async function renderSubgraph(kind: string): Promise<void> {
  const sg: SubgraphResponse = await client.subgraph(kind);
  const badges = teacherBadges(sg);
  const list = el("subgraph-nodes");
  list.innerHTML = "";
  for (const node of sg.nodes) {
    const li = document.createElement("li");
    const badge = badges.get(node.id);
    li.textContent = `${node.label} (${node.kind})${badge ? ` — ${badge}` : ""}`;
    li.style.color = kindColor(node.kind);
    if (badge === "detached") li.style.fontStyle = "italic";
    list.appendChild(li);
  }
}

async function renderRoute(): Promise<void> {
  const from = el<HTMLInputElement>("route-from").value.trim();
  const to = el<HTMLInputElement>("route-to").value.trim();
  const out = el("route-result");
  try {
    const route = await client.route(from, to);
    const labels = route.path.map((id) => canvas.nodes.get(id)?.label ?? id);
    out.textContent = `${labels.join(" -> ")} (length ${route.length})`;
    routeNodeSet(route); // highlighting hook for the svg view
  } catch (err) {
    out.textContent = err instanceof ApiError && err.code === "NoRoute"
      ? "no route between these courses"
      : String(err);
  }
}

function renderRecommendations(): void {
  const past = el("rec-past");
  past.innerHTML = "";
  for (const entry of recommendations.visiblePast()) {
    const li = document.createElement("li");
    const label = canvas.nodes.get(entry.exercise)?.label ?? entry.exercise;
    li.textContent = entry.unstarted
      ? `${label} — topic not started`
      : `${label} — LS ${entry.ls}`;
    past.appendChild(li);
  }
  const buckets = el("rec-buckets");
  buckets.innerHTML = "";
  for (const bucket of recommendations.buckets()) {
    const li = document.createElement("li");
    const names = bucket.exercises.map((id) => canvas.nodes.get(id)?.label ?? id);
    li.textContent = `${bucket.name}: ${names.join(", ") || "—"}`;
    buckets.appendChild(li);
  }
}

// -- app assembly ------------------------------------------------------------------

async function enterApp(): Promise<void> {
  await canvas.refresh();
  canvas.startPolling();
  await inbox.refresh();
  renderInbox();
  renderCanvas();
  setInterval(renderCanvas, canvas.pollIntervalMs);
}

function wire(): void {
  el("login-go").onclick = () => void onLogin();
  el("challenge-yes").onclick = () => void onAnswer("yes");
  el("challenge-no").onclick = () => void onAnswer("no");
  el("challenge-send").onclick = () =>
    void onAnswer(el<HTMLInputElement>("challenge-input").value);
  el("add-entity").onclick = () => {
    const kind = el<HTMLInputElement>("entity-kind").value.trim();
    const label = el<HTMLInputElement>("entity-label").value.trim();
    void canvas.addEntity(kind, label).then(renderCanvas);
  };
  el("add-triple").onclick = () => {
    const s = el<HTMLInputElement>("triple-subject").value.trim();
    const p = el<HTMLInputElement>("triple-predicate").value.trim();
    const o = el<HTMLInputElement>("triple-object").value.trim();
    const object = canvas.nodes.has(o) ? { entity: o } : { literal: o };
    void canvas.addTriple(s, p, object).then(renderCanvas);
  };
  el<HTMLSelectElement>("subgraph-kind").onchange = (ev) =>
    void renderSubgraph((ev.target as HTMLSelectElement).value);
  el("route-go").onclick = () => void renderRoute();
  el("rec-load").onclick = () => {
    const student = el<HTMLInputElement>("rec-student").value.trim();
    void recommendations.load(student).then(() => {
      el<HTMLInputElement>("rec-slider").value = String(recommendations.threshold);
      renderRecommendations();
    });
  };
  el<HTMLInputElement>("rec-slider").oninput = (ev) => {
    recommendations.setThreshold(Number((ev.target as HTMLInputElement).value));
    el("rec-p").textContent = (ev.target as HTMLInputElement).value;
    renderRecommendations();
  };
  renderLogin();
}

document.addEventListener("DOMContentLoaded", wire);
