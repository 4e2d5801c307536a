/** Minimal DOM rendering for the in-SVG application.
 *
 * The app lives inside a foreignObject layered over the artwork. All
 * rendering is plain elements and click handlers; no framework, so the
 * same code runs in a browser and under the test harness DOM.
 */

export type Handler = () => void;

export interface ViewState {
  screen: 'connect' | 'lobby' | 'setup' | 'play' | 'finished' | 'error';
  banner: string;
  detail: string;
}

const XHTML = 'http://www.w3.org/1999/xhtml';
const SVG = 'http://www.w3.org/2000/svg';

export class Ui {
  root: Element;
  container: Element;
  state: ViewState = { screen: 'connect', banner: '', detail: '' };
  handlers = new Map<string, Handler>();

  constructor(doc: Document = document) {
    this.root = doc.documentElement;
    const foreign = doc.createElementNS(SVG, 'foreignObject');
    foreign.setAttribute('x', '16');
    foreign.setAttribute('y', '80');
    foreign.setAttribute('width', '480');
    foreign.setAttribute('height', '360');
    foreign.setAttribute('id', 'nfp-app');
    this.container = doc.createElementNS(XHTML, 'div');
    this.container.setAttribute('id', 'nfp-app-root');
    foreign.appendChild(this.container);
    this.root.appendChild(foreign);
    this.doc = doc;
  }

  private doc: Document;

  private clear(): void {
    while (this.container.firstChild) this.container.removeChild(this.container.firstChild);
  }

  private el(tag: string, text: string, id?: string): Element {
    const node = this.doc.createElementNS(XHTML, tag);
    node.textContent = text;
    if (id) node.setAttribute('id', id);
    return node;
  }

  /** Register a named action and return a clickable element for it. */
  button(label: string, action: string, handler: Handler): Element {
    this.handlers.set(action, handler);
    const node = this.el('button', label, `nfp-action-${action}`);
    node.addEventListener('click', handler as EventListener);
    return node;
  }

  /** Programmatic click, used by tests and keyboard shortcuts alike. */
  trigger(action: string): void {
    const handler = this.handlers.get(action);
    if (!handler) throw new Error(`no action ${action}`);
    handler();
  }

  render(state: Partial<ViewState>, body: Element[]): void {
    this.state = { ...this.state, ...state };
    this.clear();
    this.container.appendChild(this.el('h2', `nfp — ${this.state.screen}`, 'nfp-screen'));
    if (this.state.banner) {
      this.container.appendChild(this.el('p', this.state.banner, 'nfp-banner'));
    }
    if (this.state.detail) {
      this.container.appendChild(this.el('p', this.state.detail, 'nfp-detail'));
    }
    for (const node of body) this.container.appendChild(node);
  }

  textRow(text: string, id?: string): Element {
    return this.el('div', text, id);
  }
}

/** Compact textual board for play view and for recovery comparisons. */
export function boardLines(
  myCells: Map<string, string> | null,
  hitsAgainstMe: string[],
  myShots: Record<string, string>,
): { home: string[]; away: string[] } {
  const home: string[] = [];
  const away: string[] = [];
  const hitSet = new Set(hitsAgainstMe);
  for (let y = 0; y < 10; y++) {
    let homeRow = '';
    let awayRow = '';
    for (let x = 0; x < 10; x++) {
      const key = `${x},${y}`;
      if (hitSet.has(key)) homeRow += 'x';
      else if (myCells && myCells.has(key)) homeRow += myCells.get(key)![0];
      else homeRow += '.';
      const shot = myShots[key];
      awayRow += shot === 'hit' ? 'x' : shot === 'miss' ? 'o' : '.';
    }
    home.push(homeRow);
    away.push(awayRow);
  }
  return { home, away };
}
