/** What the document layer must be able to do.
 *
 * The controller talks to the page only through this interface, always
 * passing fully formatted view models. A real implementation writes
 * them into DOM nodes; tests substitute a recorder and inspect exactly
 * what would have been shown.
 */
import type { ComparePanelVm, WalkthroughVm } from "./render.js";

export interface PresetVm {
  label: string;
  /** False when the entry names controls the served dataset lacks. */
  resolvable: boolean;
}

export interface HistoryRowVm {
  text: string;
  include: string[];
}

export interface View {
  setSessionText(text: string | null): void;
  setBanner(message: string | null): void;
  setWarning(message: string | null): void;
  renderGrid(names: string[], include: boolean[]): void;
  renderPresets(presets: PresetVm[]): void;
  renderPanel(vm: ComparePanelVm | null): void;
  renderWalkthrough(vm: WalkthroughVm): void;
  renderHistory(rows: HistoryRowVm[]): void;
}
