/**
 * Browser wiring. All state lives in the pure modules; this file only
 * moves values between them and the DOM. The draft is mirrored into
 * localStorage so an interrupted wizard can be resumed.
 */

import { ApiClient, ApiError } from './api.js';
import { formatMoney } from './money.js';
import { ConsoleSession } from './session.js';
import {
  MATURITY_LEVELS,
  RATINGS,
  WIZARD_STEPS,
  emptyDraft,
  toProfileDocument,
  validateDraft,
  validateStep,
  type WizardDraft,
} from './wizard.js';
import type { CatalogDoc, ChangeDoc, ReportDoc } from './types.js';

const DRAFT_KEY = 'qber-console-draft';

const api = new ApiClient(window.location.origin);

let catalog: CatalogDoc | null = null;
let draft: WizardDraft = loadDraft();
let stepIndex = 0;
let session: ConsoleSession | null = null;

function loadDraft(): WizardDraft {
  try {
    const raw = localStorage.getItem(DRAFT_KEY);
    if (raw) return JSON.parse(raw) as WizardDraft;
  } catch {
    // corrupted draft: start over
  }
  return emptyDraft();
}

function saveDraft(): void {
  localStorage.setItem(DRAFT_KEY, JSON.stringify(draft));
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function input(value: string, onChange: (v: string) => void, placeholder = ''): HTMLInputElement {
  const node = el('input', { type: 'text', placeholder });
  node.value = value;
  node.addEventListener('input', () => {
    onChange(node.value);
    saveDraft();
  });
  return node;
}

function select(options: string[], value: string, onChange: (v: string) => void): HTMLSelectElement {
  const node = el('select');
  for (const option of options) {
    node.append(el('option', { value: option }, option));
  }
  node.value = value;
  node.addEventListener('change', () => {
    onChange(node.value);
    saveDraft();
  });
  return node;
}

// ---- wizard rendering ----

function renderWizard(): void {
  const root = byId('wizard');
  root.replaceChildren();
  const step = WIZARD_STEPS[stepIndex];
  if (!step) return;

  root.append(
    el('h2', {}, `Step ${stepIndex + 1} of ${WIZARD_STEPS.length}: ${step.title}`),
    el('p', { class: 'muted' }, step.description),
  );

  const body = el('div', { class: 'step-body' });
  root.append(body);

  if (step.id === 'size') {
    body.append(
      labeled('Company name', input(draft.companyName, (v) => (draft.companyName = v))),
      labeled('Yearly revenue', input(draft.yearlyRevenue, (v) => (draft.yearlyRevenue = v), 'e.g. 10,000,000')),
      labeled('Currency', select(['USD', 'EUR', 'GBP', 'INR', 'JPY'], draft.currency, (v) => (draft.currency = v))),
      labeled('Employees', input(draft.employeeCount, (v) => (draft.employeeCount = v), 'e.g. 500')),
    );
  } else if (step.id === 'market') {
    body.append(
      labeled('Sector', input(draft.sector, (v) => (draft.sector = v), 'e.g. BFSI')),
      labeled('Country', input(draft.country, (v) => (draft.country = v), 'e.g. India')),
    );
    const listed = el('input', { type: 'checkbox' });
    listed.checked = draft.listedCompany === true;
    listed.addEventListener('change', () => {
      draft.listedCompany = listed.checked;
      saveDraft();
    });
    body.append(labeled('Publicly listed', listed));
  } else if (step.id === 'structure') {
    renderStructureStep(body);
  } else if (step.id === 'shares') {
    renderSharesStep(body);
  } else if (step.id === 'controls') {
    renderControlsStep(body);
  }

  const issues = validateStep(draft, step.id, catalog ?? undefined);
  const issueList = el('ul', { class: 'issues' });
  for (const item of issues) {
    issueList.append(el('li', {}, `${item.code}: ${item.message}`));
  }
  root.append(issueList);

  const nav = el('div', { class: 'nav' });
  if (stepIndex > 0) {
    const back = el('button', {}, 'Back');
    back.addEventListener('click', () => {
      stepIndex -= 1;
      renderWizard();
    });
    nav.append(back);
  }
  if (stepIndex < WIZARD_STEPS.length - 1) {
    const next = el('button', {}, 'Next');
    next.disabled = issues.length > 0;
    next.addEventListener('click', () => {
      stepIndex += 1;
      renderWizard();
    });
    nav.append(next);
  } else {
    const submit = el('button', { class: 'primary' }, 'Run assessment');
    submit.disabled = validateDraft(draft, catalog ?? undefined).length > 0;
    submit.addEventListener('click', () => void submitDraft());
    nav.append(submit);
  }
  root.append(nav);
}

function labeled(label: string, control: HTMLElement): HTMLElement {
  return el('label', { class: 'field' }, el('span', {}, label), control);
}

function renderStructureStep(body: HTMLElement): void {
  draft.units.forEach((unit, ui) => {
    const section = el('fieldset', {}, el('legend', {}, `Unit ${ui + 1}`));
    section.append(labeled('Unit name', input(unit.name, (v) => (unit.name = v))));
    unit.segments.forEach((segment, si) => {
      section.append(labeled(`Segment ${si + 1} name`, input(segment.name, (v) => (segment.name = v))));
    });
    const addSegment = el('button', {}, 'Add segment');
    addSegment.addEventListener('click', () => {
      unit.segments.push({ name: '', revenueShare: '', controls: [], threats: [] });
      saveDraft();
      renderWizard();
    });
    const removeUnit = el('button', {}, 'Remove unit');
    removeUnit.addEventListener('click', () => {
      draft.units.splice(ui, 1);
      saveDraft();
      renderWizard();
    });
    section.append(addSegment, removeUnit);
    body.append(section);
  });
  const addUnit = el('button', {}, 'Add unit');
  addUnit.addEventListener('click', () => {
    draft.units.push({ name: '', revenueShare: '', segments: [] });
    saveDraft();
    renderWizard();
  });
  body.append(addUnit);
}

function renderSharesStep(body: HTMLElement): void {
  draft.units.forEach((unit, ui) => {
    const section = el('fieldset', {}, el('legend', {}, unit.name || `Unit ${ui + 1}`));
    section.append(labeled('Unit revenue share (0..1)', input(unit.revenueShare, (v) => (unit.revenueShare = v), 'e.g. 0.6')));
    unit.segments.forEach((segment, si) => {
      section.append(labeled(
        `${segment.name || `Segment ${si + 1}`} share (0..1)`,
        input(segment.revenueShare, (v) => (segment.revenueShare = v), 'e.g. 0.6'),
      ));
    });
    body.append(section);
  });
}

function renderControlsStep(body: HTMLElement): void {
  const controlIds = catalog ? catalog.controls.map((c) => c.id) : [];
  const threatIds = catalog ? catalog.threats.map((t) => t.id) : [];

  draft.units.forEach((unit) => {
    unit.segments.forEach((segment) => {
      const section = el('fieldset', {}, el('legend', {}, `${unit.name}/${segment.name}`));

      segment.controls.forEach((control, ci) => {
        const row = el('div', { class: 'row' });
        row.append(
          select(controlIds.length ? controlIds : [control.controlId], control.controlId, (v) => (control.controlId = v)),
          select(MATURITY_LEVELS, control.maturity, (v) => (control.maturity = v)),
        );
        const remove = el('button', {}, 'Remove');
        remove.addEventListener('click', () => {
          segment.controls.splice(ci, 1);
          saveDraft();
          renderWizard();
        });
        row.append(remove);
        section.append(row);
      });
      const addControl = el('button', {}, 'Add control');
      addControl.addEventListener('click', () => {
        segment.controls.push({ controlId: controlIds[0] ?? '', maturity: 'initial' });
        saveDraft();
        renderWizard();
      });
      section.append(addControl);

      segment.threats.forEach((threat, ti) => {
        const row = el('div', { class: 'row' });
        row.append(
          select(threatIds.length ? threatIds : [threat.threatId], threat.threatId, (v) => (threat.threatId = v)),
          input(threat.riskWeight, (v) => (threat.riskWeight = v), 'weight 0..10'),
          select(RATINGS, threat.operational, (v) => (threat.operational = v)),
          select(RATINGS, threat.financial, (v) => (threat.financial = v)),
        );
        const remove = el('button', {}, 'Remove');
        remove.addEventListener('click', () => {
          segment.threats.splice(ti, 1);
          saveDraft();
          renderWizard();
        });
        row.append(remove);
        section.append(row);
      });
      const addThreat = el('button', {}, 'Add threat');
      addThreat.addEventListener('click', () => {
        segment.threats.push({
          threatId: threatIds[0] ?? '',
          riskWeight: '5',
          operational: 'medium',
          financial: 'medium',
        });
        saveDraft();
        renderWizard();
      });
      section.append(addThreat);

      body.append(section);
    });
  });
}

// ---- submission and results ----

async function submitDraft(): Promise<void> {
  try {
    const profileDoc = toProfileDocument(draft);
    const { id: profileId } = await api.createProfile(profileDoc);
    const { report } = await api.createAssessment(profileId);
    session = new ConsoleSession(api, report);
    localStorage.removeItem(DRAFT_KEY);
    byId('wizard').hidden = true;
    byId('results').hidden = false;
    renderResults();
  } catch (error) {
    showError(error);
  }
}

function showError(error: unknown): void {
  const banner = byId('banner');
  if (error instanceof ApiError && error.code === 'STALE_CATALOG') {
    banner.textContent = 'The control catalog changed since this assessment. Reload to start over.';
  } else if (error instanceof ApiError) {
    banner.textContent = `${error.code}: ${error.message}`;
  } else {
    banner.textContent = String(error);
  }
  banner.hidden = false;
}

function toggleAndRefresh(key: string, change: ChangeDoc): void {
  if (!session) return;
  session.toggle(key, change);
  void refreshView();
}

async function refreshView(): Promise<void> {
  if (!session) return;
  const outcome = await session.refresh();
  if (outcome.status === 'error') {
    showError(outcome.error);
    return;
  }
  if (outcome.status === 'applied') {
    byId('banner').hidden = true;
    renderResults();
  }
  // stale outcomes are dropped on the floor by design
}

function renderResults(): void {
  if (!session) return;
  const view = session.view;
  const report: ReportDoc = session.report;

  const latency = byId('latency');
  latency.textContent = session.latencyMs === null ? '' : `last update ${session.latencyMs} ms`;

  const bars = byId('segment-bars');
  bars.replaceChildren();
  for (const bar of view.segmentBars) {
    const fill = el('div', { class: 'bar-fill', style: `width:${bar.widthPercent.toFixed(1)}%` });
    bars.append(el(
      'div',
      { class: 'bar' },
      el('div', { class: 'bar-label' }, `${bar.label}: risk ${bar.riskDisplay}, ALE ${bar.aleDisplay}, exposure ${bar.exposure.toFixed(3)}`),
      el('div', { class: 'bar-track' }, fill),
    ));
  }

  const domains = byId('domain-ranking');
  domains.replaceChildren();
  for (const row of view.domainRanking.slice(0, 10)) {
    domains.append(el('li', {}, `${row.domainId} (${row.score.toFixed(3)})`));
  }

  const table = byId('recommendations');
  table.replaceChildren(el(
    'tr',
    {},
    el('th', {}, 'Control'),
    el('th', {}, 'Where'),
    el('th', {}, 'Upgrade'),
    el('th', {}, 'Cost/yr'),
    el('th', {}, 'Return ratio'),
    el('th', {}, 'Picked'),
  ));
  for (const row of view.recommendations) {
    table.append(el(
      'tr',
      { class: row.chosen ? 'chosen' : '' },
      el('td', {}, `${row.controlName} (${row.controlId})`),
      el('td', {}, `${row.unit}/${row.segment}`),
      el('td', {}, `${row.currentMaturity} → ${row.targetMaturity}`),
      el('td', {}, row.costDisplay),
      el('td', {}, row.zRosi.toFixed(2)),
      el('td', {}, row.chosen ? 'yes' : ''),
    ));
  }
  byId('plan-summary').textContent =
    `Plan cost ${view.totalCostDisplay}, residual risk ${view.residualDisplay}` +
    (view.budgetDisplay ? `, budget ${view.budgetDisplay}` : '');

  renderToggles(report);
  renderDownload(report);
}

function renderToggles(report: ReportDoc): void {
  const root = byId('toggles');
  root.replaceChildren();
  for (const unitDoc of report.profile_snapshot.units) {
    for (const segmentDoc of unitDoc.segments) {
      const section = el('fieldset', {}, el('legend', {}, `${unitDoc.name}/${segmentDoc.name}`));
      for (const impl of segmentDoc.implemented_controls) {
        const offKey = `off:${unitDoc.name}:${segmentDoc.name}:${impl.control_id}`;
        const offBox = el('input', { type: 'checkbox' });
        offBox.checked = session?.isActive(offKey) ?? false;
        offBox.addEventListener('change', () => {
          toggleAndRefresh(offKey, {
            op: 'remove_control',
            unit: unitDoc.name,
            segment: segmentDoc.name,
            control_id: impl.control_id,
          });
        });
        section.append(labeled(`Switch off ${impl.control_id}`, offBox));

        const stepKey = `mat:${unitDoc.name}:${segmentDoc.name}:${impl.control_id}`;
        const stepBox = el('input', { type: 'checkbox' });
        stepBox.checked = session?.isActive(stepKey) ?? false;
        stepBox.addEventListener('change', () => {
          toggleAndRefresh(stepKey, {
            op: 'set_maturity',
            unit: unitDoc.name,
            segment: segmentDoc.name,
            control_id: impl.control_id,
            maturity: 'optimized',
          });
        });
        section.append(labeled(`Raise ${impl.control_id} to optimized`, stepBox));
      }
      root.append(section);
    }
  }

  const slider = byId('budget-slider') as HTMLInputElement;
  const revenue = report.profile_snapshot.yearly_revenue;
  slider.max = String(Math.max(1, Math.round(revenue.amount / 10)));
  slider.addEventListener('input', () => {
    session?.setBudget(Number(slider.value));
    byId('budget-value').textContent = formatMoney({
      amount: Number(slider.value),
      currency: revenue.currency,
    });
    void refreshView();
  });
}

function renderDownload(report: ReportDoc): void {
  const link = byId('download') as HTMLAnchorElement;
  const blob = new Blob([JSON.stringify(report, null, 1)], { type: 'application/json' });
  if (link.href.startsWith('blob:')) URL.revokeObjectURL(link.href);
  link.href = URL.createObjectURL(blob);
  link.download = `report-${report.id}.json`;
  link.textContent = 'Download report JSON';
}

// ---- boot ----

async function boot(): Promise<void> {
  try {
    catalog = await api.getCatalog();
  } catch (error) {
    showError(error);
  }
  renderWizard();
}

void boot();
