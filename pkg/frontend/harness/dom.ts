/** Minimal DOM sandbox for running the SVG bootloader and the injected
 * application outside a browser.
 *
 * Implements just the surface those scripts touch: element creation,
 * tree manipulation, id/namespace lookup, click listeners, and the
 * browser convention that a <script> element appended to the document
 * executes its textContent. Network, crypto, and streams come from the
 * real Node globals; fetch is wrapped so tests can audit every request
 * body that leaves the client.
 */

export class StubElement {
  children: StubElement[] = [];
  parentNode: StubElement | null = null;
  textContent = '';
  attributes = new Map<string, string>();
  listeners = new Map<string, Array<() => void>>();

  constructor(
    readonly ns: string | null,
    readonly localName: string,
    private sandbox: Sandbox | null = null,
  ) {}

  get firstChild(): StubElement | null {
    return this.children[0] ?? null;
  }

  appendChild(child: StubElement): StubElement {
    child.parentNode = this;
    this.children.push(child);
    if (this.sandbox) child.adopt(this.sandbox);
    if (child.localName === 'script' && this.sandbox && child.textContent) {
      this.sandbox.runScript(child.textContent);
    }
    return child;
  }

  adopt(sandbox: Sandbox): void {
    this.sandbox = sandbox;
    for (const child of this.children) child.adopt(sandbox);
  }

  removeChild(child: StubElement): StubElement {
    const i = this.children.indexOf(child);
    if (i !== -1) this.children.splice(i, 1);
    child.parentNode = null;
    return child;
  }

  setAttribute(name: string, value: string): void {
    this.attributes.set(name, value);
  }

  getAttribute(name: string): string | null {
    return this.attributes.get(name) ?? null;
  }

  getAttributeNS(ns: string, name: string): string | null {
    return this.attributes.get(`{${ns}}${name}`) ?? this.attributes.get(name) ?? null;
  }

  addEventListener(event: string, handler: () => void): void {
    const list = this.listeners.get(event) ?? [];
    list.push(handler);
    this.listeners.set(event, list);
  }

  click(): void {
    for (const handler of this.listeners.get('click') ?? []) handler();
  }

  *walk(): Generator<StubElement> {
    yield this;
    for (const child of this.children) yield* child.walk();
  }
}

export class StubDocument {
  documentElement: StubElement;

  constructor(private sandbox: Sandbox) {
    this.documentElement = new StubElement('http://www.w3.org/2000/svg', 'svg', sandbox);
  }

  createElementNS(ns: string, tag: string): StubElement {
    return new StubElement(ns, tag, this.sandbox);
  }

  createElement(tag: string): StubElement {
    return new StubElement(null, tag, this.sandbox);
  }

  getElementById(id: string): StubElement | null {
    for (const el of this.documentElement.walk()) {
      if (el.getAttribute('id') === id) return el;
    }
    return null;
  }

  getElementsByTagNameNS(ns: string, local: string): StubElement[] {
    const out: StubElement[] = [];
    for (const el of this.documentElement.walk()) {
      if (el.ns === ns && el.localName === local) out.push(el);
    }
    return out;
  }
}

export class StubStorage {
  private data: Map<string, string>;

  constructor(shared?: Map<string, string>) {
    this.data = shared ?? new Map();
  }

  getItem(key: string): string | null {
    return this.data.has(key) ? this.data.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, String(value));
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }

  clear(): void {
    this.data.clear();
  }

  backing(): Map<string, string> {
    return this.data;
  }
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: string;
}

export class Sandbox {
  document: StubDocument;
  localStorage: StubStorage;
  window: Record<string, unknown>;
  requests: RecordedRequest[] = [];

  constructor(storageBacking?: Map<string, string>) {
    this.document = new StubDocument(this);
    this.localStorage = new StubStorage(storageBacking);
    this.window = {};
    (this.window as any).window = this.window;
  }

  private recordingFetch = async (url: string, init?: RequestInit): Promise<Response> => {
    this.requests.push({
      url: String(url),
      method: init?.method ?? 'GET',
      body: typeof init?.body === 'string' ? init.body : '',
    });
    return fetch(url, init);
  };

  /** Load the nfp metadata of a real built SVG into the stub tree. */
  loadSvgMetadata(svgText: string): void {
    const match = svgText.match(/<nfp:web\s([^>]*)\/>/);
    if (!match) throw new Error('SVG has no nfp:web element');
    const metadata = this.document.createElementNS('urn:nfp:v1', 'metadata-holder');
    const web = this.document.createElementNS('urn:nfp:v1', 'web');
    for (const attr of match[1].matchAll(/nfp:([a-z]+)="([^"]*)"/g)) {
      web.setAttribute(`{urn:nfp:v1}${attr[1]}`, attr[2].replace(/&amp;/g, '&'));
    }
    metadata.appendChild(web);
    this.document.documentElement.appendChild(metadata);
  }

  static extractBootloader(svgText: string): string {
    const match = svgText.match(/<script><!\[CDATA\[([\s\S]*?)\]\]><\/script>/);
    if (!match) throw new Error('SVG has no bootloader script');
    return match[1];
  }

  runScript(code: string): void {
    const fn = new Function(
      'window', 'document', 'localStorage', 'fetch', 'self',
      code,
    );
    fn(this.window, this.document, this.localStorage, this.recordingFetch, this.window);
  }

  /** Poll a predicate driven by the sandboxed scripts' async work. */
  async waitFor(check: () => boolean, label: string, timeoutMs = 20000): Promise<void> {
    const start = Date.now();
    while (!check()) {
      if (Date.now() - start > timeoutMs) throw new Error(`timeout waiting for ${label}`);
      await new Promise((resolve) => setTimeout(resolve, 25));
    }
  }
}
