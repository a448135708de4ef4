/** Input coalescing for the toggle grid.
 *
 * Toggles fire at human speed but can burst (drag across checkboxes,
 * preset click). A trailing-edge debounce holds the request until the
 * hand settles, and the latest-wins guard aborts whatever is still in
 * flight when a newer request leaves, so the service sees at most one
 * outstanding projection per session.
 */

export const DEBOUNCE_MS = 150;

export interface Debounced<A extends unknown[]> {
  call: (...args: A) => void;
  cancel: () => void;
  flush: () => void;
}

export function debounced<A extends unknown[]>(
  ms: number,
  fn: (...args: A) => void,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;
  const fire = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
    if (pending) {
      const args = pending;
      pending = null;
      fn(...args);
    }
  };
  return {
    call: (...args: A) => {
      pending = args;
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(fire, ms);
    },
    cancel: () => {
      if (timer !== null) clearTimeout(timer);
      timer = null;
      pending = null;
    },
    flush: fire,
  };
}

/** Hands out an AbortSignal per attempt, cancelling the previous one. */
export class LatestWins {
  private ctrl: AbortController | null = null;

  begin(): AbortSignal {
    this.ctrl?.abort();
    this.ctrl = new AbortController();
    return this.ctrl.signal;
  }

  /** True while a begun attempt has not been settled or superseded. */
  get active(): boolean {
    return this.ctrl !== null && !this.ctrl.signal.aborted;
  }

  settle(signal: AbortSignal): void {
    if (this.ctrl && this.ctrl.signal === signal) this.ctrl = null;
  }
}
