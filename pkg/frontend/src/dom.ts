/** Document-backed implementation of the view interface.
 *
 * Strictly a writing layer: it copies preformatted strings and path
 * data into nodes and forwards input events to the handlers it was
 * given. No number is computed here beyond none at all.
 */
import type { ComparePanelVm, IntervalVm, WalkthroughVm } from "./render.js";
import type { HistoryRowVm, PresetVm, View } from "./view.js";

export interface ViewHandlers {
  onToggle(index: number): void;
  onPreset(label: string): void;
  onHistory(include: string[]): void;
}

function must<T extends Element>(doc: Document, selector: string): T {
  const el = doc.querySelector(selector);
  if (!el) throw new Error(`missing element: ${selector}`);
  return el as T;
}

function setHidden(el: Element, hidden: boolean): void {
  el.classList.toggle("hidden", hidden);
}

function paintInterval(
  doc: Document,
  rowSel: string,
  vm: IntervalVm | null,
): void {
  const row = must<HTMLElement>(doc, rowSel);
  setHidden(row, vm === null);
  if (!vm) return;
  const bar = must<HTMLElement>(doc, `${rowSel} .bar`);
  const dot = must<HTMLElement>(doc, `${rowSel} .dot`);
  bar.style.left = `${Math.min(vm.loPct, vm.hiPct)}%`;
  bar.style.width = `${Math.abs(vm.hiPct - vm.loPct)}%`;
  dot.style.left = `${vm.meanPct}%`;
  must<HTMLElement>(doc, `${rowSel} .mean`).textContent = vm.meanText;
  must<HTMLElement>(doc, `${rowSel} .interval`).textContent = vm.intervalText;
  must<HTMLElement>(doc, `${rowSel} .sd`).textContent = vm.sdText;
}

export function buildView(doc: Document, handlers: ViewHandlers): View {
  return {
    setSessionText(text) {
      must<HTMLElement>(doc, "#session").textContent = text ?? "";
    },

    setBanner(message) {
      setHidden(must(doc, "#banner"), message === null);
      must<HTMLElement>(doc, "#banner-msg").textContent = message ?? "";
    },

    setWarning(message) {
      const el = must<HTMLElement>(doc, "#warning");
      setHidden(el, message === null);
      el.textContent = message ?? "";
    },

    renderGrid(names, include) {
      const grid = must<HTMLElement>(doc, "#grid");
      grid.textContent = "";
      names.forEach((name, j) => {
        const label = doc.createElement("label");
        label.className = "control";
        const box = doc.createElement("input");
        box.type = "checkbox";
        box.checked = include[j] ?? false;
        box.addEventListener("change", () => handlers.onToggle(j));
        label.append(box, doc.createTextNode(name));
        grid.append(label);
      });
    },

    renderPresets(presets) {
      const bar = must<HTMLElement>(doc, "#presets");
      bar.textContent = "";
      presets.forEach((p: PresetVm) => {
        const btn = doc.createElement("button");
        btn.type = "button";
        btn.textContent = p.label;
        btn.disabled = !p.resolvable;
        if (!p.resolvable) {
          btn.title = "names controls this dataset does not have";
        }
        btn.addEventListener("click", () => handlers.onPreset(p.label));
        bar.append(btn);
      });
    },

    renderPanel(vm: ComparePanelVm | null) {
      const panel = must<HTMLElement>(doc, "#panel");
      setHidden(panel, vm === null);
      if (!vm) return;
      must<HTMLElement>(doc, "#axis-lo").textContent = vm.axisLoText;
      must<HTMLElement>(doc, "#axis-hi").textContent = vm.axisHiText;
      const zero = must<SVGLineElement>(doc, "#zero-line");
      if (vm.zeroPct === null) {
        zero.setAttribute("visibility", "hidden");
      } else {
        zero.setAttribute("visibility", "visible");
        zero.setAttribute("x1", String(vm.zeroPct));
        zero.setAttribute("x2", String(vm.zeroPct));
      }
      must<SVGPathElement>(doc, "#curve-orig").setAttribute(
        "d",
        vm.original.curve.pathD,
      );
      const proj = must<SVGPathElement>(doc, "#curve-proj");
      proj.setAttribute("d", vm.projected ? vm.projected.curve.pathD : "");
      paintInterval(doc, "#int-orig", vm.original.interval);
      paintInterval(doc, "#int-proj", vm.projected?.interval ?? null);
      must<HTMLElement>(doc, "#d-mean").textContent = vm.dMeanText ?? "";
      must<HTMLElement>(doc, "#subset-size").textContent = vm.subsetText ?? "";
      const badMass =
        !vm.original.curve.integralOk ||
        (vm.projected !== null && !vm.projected.curve.integralOk);
      setHidden(must(doc, "#density-note"), !badMass);
    },

    renderWalkthrough(vm: WalkthroughVm) {
      const slider = must<HTMLInputElement>(doc, "#step-slider");
      slider.disabled = !vm.enabled;
      slider.max = String(vm.maxStep);
      slider.value = String(vm.step);
      must<HTMLButtonElement>(doc, "#apply-step").disabled = !vm.enabled;
      must<HTMLElement>(doc, "#step-label").textContent = vm.stepLabel;
      const list = must<HTMLElement>(doc, "#removed-list");
      list.textContent = "";
      vm.removedSoFar.forEach((name) => {
        const li = doc.createElement("li");
        li.textContent = name;
        list.append(li);
      });
      must<SVGPathElement>(doc, "#trace-path").setAttribute(
        "d",
        vm.tracePathD,
      );
      const marker = must<SVGCircleElement>(doc, "#trace-marker");
      const pt = vm.step >= 1 ? vm.trace[vm.step - 1] : undefined;
      if (pt) {
        marker.setAttribute("visibility", "visible");
        marker.setAttribute("cx", pt.xPct.toFixed(2));
        marker.setAttribute("cy", ((pt.yPct / 100) * 40).toFixed(2));
      } else {
        marker.setAttribute("visibility", "hidden");
      }
      paintInterval(doc, "#walk-interval", vm.interval);
      must<HTMLElement>(doc, "#walk-d").textContent = vm.dText ?? "";
    },

    renderHistory(rows: HistoryRowVm[]) {
      const list = must<HTMLElement>(doc, "#history");
      list.textContent = "";
      rows.forEach((row) => {
        const li = doc.createElement("li");
        const btn = doc.createElement("button");
        btn.type = "button";
        btn.textContent = row.text;
        btn.addEventListener("click", () => handlers.onHistory(row.include));
        li.append(btn);
        list.append(li);
      });
    },
  };
}
